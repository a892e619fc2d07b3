#pragma once

#include <cstdint>
#include <optional>

namespace evreg {

/// Counter-based random stream: the n-th draw is a pure function of
/// (key, n), so sequences are identical on every platform. A stream has a
/// single owner; hand each worker its own `split`.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t counter() const { return counter_; }

  /// Independent child stream. Splitting does not advance this stream.
  RngStream split(std::uint64_t stream_id) const;

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform();
  double normal();
  /// Gamma(shape, scale = 1), Marsaglia–Tsang.
  double gamma(double shape);
  double chi_squared(double dof);

 private:
  RngStream(std::uint64_t seed, std::uint64_t key) : seed_(seed), key_(key) {}

  std::uint64_t seed_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::optional<double> spare_normal_;
};

}  // namespace evreg
