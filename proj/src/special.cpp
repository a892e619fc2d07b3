#include "evreg/special.hpp"

#include <array>
#include <cmath>
#include <limits>

#include "evreg/errors.hpp"

namespace evreg {

namespace {

constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0)) throw DomainError("log_gamma: argument must be positive");
  if (x < 0.5) {
    // Reflection keeps the series in its accurate range.
    return std::log(kPi / std::sin(kPi * x)) - log_gamma(1.0 - x);
  }
  const double z = x - 1.0;
  double a = kLanczos[0];
  const double t = z + kLanczosG + 0.5;
  for (std::size_t i = 1; i < kLanczos.size(); ++i) a += kLanczos[i] / (z + static_cast<double>(i));
  return 0.5 * std::log(2.0 * kPi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

double digamma(double x) {
  if (!(x > 0.0)) throw DomainError("digamma: argument must be positive");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Asymptotic series; Bernoulli terms up to B_12.
  const double series =
      inv2 * (1.0 / 12 - inv2 * (1.0 / 120 - inv2 * (1.0 / 252 - inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * 691.0 / 32760)))));
  return shift + std::log(x) - 0.5 * inv - series;
}

double log_multigamma(int n, double a) {
  if (n < 1) throw DomainError("log_multigamma: dimension must be positive");
  if (!(a > 0.5 * (n - 1))) throw DomainError("log_multigamma: a must exceed (n-1)/2");
  double s = 0.25 * n * (n - 1) * kLogPi;
  for (int j = 0; j < n; ++j) s += log_gamma(a - 0.5 * j);
  return s;
}

}  // namespace evreg
