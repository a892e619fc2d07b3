#pragma once

// Dense linear algebra for the small symmetric positive definite matrices
// that parametrize evidential heads (n is typically 1..8).

#include <cstddef>
#include <span>
#include <vector>

namespace evreg {

using Vector = std::vector<double>;

/// Square matrix stored row-major. Symmetric to within 1e-12 (scaled by the
/// largest entry) whenever constructed through the checked factories.
class SymMatrix {
 public:
  SymMatrix() = default;
  explicit SymMatrix(std::size_t n) : n_(n), data_(n * n, 0.0) {}

  static SymMatrix identity(std::size_t n);
  static SymMatrix diagonal(std::span<const double> diag);
  /// Validates symmetry and finiteness, then stores the exact average
  /// (a + aᵀ)/2 so downstream code sees a bitwise symmetric matrix.
  static SymMatrix from_rows(std::size_t n, std::span<const double> rows);
  /// Builds c·v·vᵀ.
  static SymMatrix outer(std::span<const double> v, double c = 1.0);

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  /// Writes (i,j) and (j,i).
  void set(std::size_t i, std::size_t j, double v) {
    data_[i * n_ + j] = v;
    data_[j * n_ + i] = v;
  }
  std::span<const double> data() const { return data_; }

  double max_abs() const;
  SymMatrix scaled(double c) const;
  SymMatrix plus(const SymMatrix& other) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

/// Lower-triangular factor with strictly positive diagonal; the canonical
/// representation of an SPD matrix A = L·Lᵀ.
class CholeskyFactor {
 public:
  CholeskyFactor() = default;

  static CholeskyFactor identity(std::size_t n);
  /// Full row-major n×n input. Throws DomainError if the upper triangle is
  /// non-zero, an entry is non-finite or a diagonal entry is not positive.
  static CholeskyFactor from_lower(std::size_t n, std::span<const double> rows);
  /// Packed lower triangle in row order (0,0),(1,0),(1,1),(2,0),...
  static CholeskyFactor from_packed(std::size_t n, std::span<const double> packed);

  std::size_t dim() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }
  std::span<const double> data() const { return data_; }
  Vector packed() const;

  /// L·Lᵀ
  SymMatrix product() const;
  /// √c·L, the factor of c·L·Lᵀ.
  CholeskyFactor scaled(double c) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

inline constexpr std::size_t packed_size(std::size_t n) { return n * (n + 1) / 2; }
/// Offset of (i,j), i >= j, in the packed lower-triangle layout.
inline constexpr std::size_t packed_index(std::size_t i, std::size_t j) { return i * (i + 1) / 2 + j; }

CholeskyFactor cholesky(const SymMatrix& a);

/// log|L·Lᵀ| = 2·Σ log L_jj
double logdet(const CholeskyFactor& l);

/// Solves L·y = b.
Vector forward_solve(const CholeskyFactor& l, std::span<const double> b);
/// Solves Lᵀ·x = y.
Vector backward_solve(const CholeskyFactor& l, std::span<const double> y);
/// Solves L·Lᵀ·x = b.
Vector spd_solve(const CholeskyFactor& l, std::span<const double> b);
/// bᵀ(L·Lᵀ)⁻¹b
double inverse_quadratic_form(const CholeskyFactor& l, std::span<const double> b);
/// (L·Lᵀ)⁻¹
SymMatrix spd_inverse(const CholeskyFactor& l);

/// log|Ψ + c·v·vᵀ| where Ψ = L·Lᵀ, via |Ψ|·(1 + c·vᵀΨ⁻¹v).
double sylvester_logdet_rank1(const CholeskyFactor& l, double c, std::span<const double> v);

Vector mat_vec(const SymMatrix& a, std::span<const double> x);
Vector lower_mat_vec(const CholeskyFactor& l, std::span<const double> x);
double dot(std::span<const double> a, std::span<const double> b);

}  // namespace evreg
