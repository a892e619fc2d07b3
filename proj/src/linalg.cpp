#include "evreg/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "evreg/errors.hpp"

namespace evreg {

namespace {

constexpr double kPivotFloor = 1e-300;
constexpr double kSymmetryTol = 1e-12;

void require_dim(std::size_t expected, std::size_t got, const char* what) {
  if (expected != got) {
    throw DimensionMismatch(std::string(what) + ": expected dimension " + std::to_string(expected) +
                            ", got " + std::to_string(got));
  }
}

}  // namespace

SymMatrix SymMatrix::identity(std::size_t n) {
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m.data_[i * n + i] = 1.0;
  return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
  SymMatrix m(diag.size());
  for (std::size_t i = 0; i < diag.size(); ++i) m.data_[i * diag.size() + i] = diag[i];
  return m;
}

SymMatrix SymMatrix::from_rows(std::size_t n, std::span<const double> rows) {
  require_dim(n * n, rows.size(), "SymMatrix::from_rows");
  double scale = 1.0;
  for (double v : rows) {
    if (!std::isfinite(v)) throw DomainError("SymMatrix: non-finite entry");
    scale = std::max(scale, std::abs(v));
  }
  SymMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double a = rows[i * n + j];
      const double b = rows[j * n + i];
      if (std::abs(a - b) > kSymmetryTol * scale) {
        throw DomainError("SymMatrix: entries (" + std::to_string(i) + "," + std::to_string(j) +
                          ") not symmetric");
      }
      m.set(i, j, 0.5 * (a + b));
    }
  }
  return m;
}

SymMatrix SymMatrix::outer(std::span<const double> v, double c) {
  SymMatrix m(v.size());
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j <= i; ++j) m.set(i, j, c * v[i] * v[j]);
  return m;
}

double SymMatrix::max_abs() const {
  double r = 0.0;
  for (double v : data_) r = std::max(r, std::abs(v));
  return r;
}

SymMatrix SymMatrix::scaled(double c) const {
  SymMatrix m = *this;
  for (double& v : m.data_) v *= c;
  return m;
}

SymMatrix SymMatrix::plus(const SymMatrix& other) const {
  require_dim(n_, other.n_, "SymMatrix::plus");
  SymMatrix m = *this;
  for (std::size_t k = 0; k < data_.size(); ++k) m.data_[k] += other.data_[k];
  return m;
}

CholeskyFactor CholeskyFactor::identity(std::size_t n) {
  CholeskyFactor l;
  l.n_ = n;
  l.data_.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) l.data_[i * n + i] = 1.0;
  return l;
}

CholeskyFactor CholeskyFactor::from_lower(std::size_t n, std::span<const double> rows) {
  require_dim(n * n, rows.size(), "CholeskyFactor::from_lower");
  CholeskyFactor l;
  l.n_ = n;
  l.data_.assign(rows.begin(), rows.end());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = rows[i * n + j];
      if (!std::isfinite(v)) throw DomainError("CholeskyFactor: non-finite entry");
      if (j > i && v != 0.0) throw DomainError("CholeskyFactor: upper triangle must be zero");
    }
    if (!(rows[i * n + i] > 0.0)) throw DomainError("CholeskyFactor: diagonal must be positive");
  }
  return l;
}

CholeskyFactor CholeskyFactor::from_packed(std::size_t n, std::span<const double> packed) {
  require_dim(packed_size(n), packed.size(), "CholeskyFactor::from_packed");
  std::vector<double> rows(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) rows[i * n + j] = packed[packed_index(i, j)];
  return from_lower(n, rows);
}

Vector CholeskyFactor::packed() const {
  Vector p(packed_size(n_));
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j <= i; ++j) p[packed_index(i, j)] = data_[i * n_ + j];
  return p;
}

SymMatrix CholeskyFactor::product() const {
  SymMatrix a(n_);
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k <= j; ++k) s += data_[i * n_ + k] * data_[j * n_ + k];
      a.set(i, j, s);
    }
  }
  return a;
}

CholeskyFactor CholeskyFactor::scaled(double c) const {
  if (!(c > 0.0)) throw DomainError("CholeskyFactor::scaled: factor must be positive");
  CholeskyFactor l = *this;
  const double s = std::sqrt(c);
  for (double& v : l.data_) v *= s;
  return l;
}

CholeskyFactor cholesky(const SymMatrix& a) {
  const std::size_t n = a.dim();
  std::vector<double> l(n * n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    double d = a(j, j);
    for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
    if (!(d > kPivotFloor)) {
      throw NotPositiveDefinite("cholesky: pivot " + std::to_string(j) + " is not positive");
    }
    const double ljj = std::sqrt(d);
    l[j * n + j] = ljj;
    for (std::size_t i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
      l[i * n + j] = s / ljj;
    }
  }
  return CholeskyFactor::from_lower(n, l);
}

double logdet(const CholeskyFactor& l) {
  double s = 0.0;
  for (std::size_t j = 0; j < l.dim(); ++j) s += std::log(l(j, j));
  return 2.0 * s;
}

Vector forward_solve(const CholeskyFactor& l, std::span<const double> b) {
  const std::size_t n = l.dim();
  require_dim(n, b.size(), "forward_solve");
  Vector y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = b[i];
    for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * y[k];
    y[i] = s / l(i, i);
  }
  return y;
}

Vector backward_solve(const CholeskyFactor& l, std::span<const double> y) {
  const std::size_t n = l.dim();
  require_dim(n, y.size(), "backward_solve");
  Vector x(n);
  for (std::size_t ii = n; ii-- > 0;) {
    double s = y[ii];
    for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
    x[ii] = s / l(ii, ii);
  }
  return x;
}

Vector spd_solve(const CholeskyFactor& l, std::span<const double> b) {
  return backward_solve(l, forward_solve(l, b));
}

double inverse_quadratic_form(const CholeskyFactor& l, std::span<const double> b) {
  const Vector u = forward_solve(l, b);
  return dot(u, u);
}

SymMatrix spd_inverse(const CholeskyFactor& l) {
  const std::size_t n = l.dim();
  SymMatrix inv(n);
  Vector e(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    std::fill(e.begin(), e.end(), 0.0);
    e[j] = 1.0;
    const Vector col = spd_solve(l, e);
    for (std::size_t i = 0; i <= j; ++i) inv.set(i, j, col[i]);
  }
  return inv;
}

double sylvester_logdet_rank1(const CholeskyFactor& l, double c, std::span<const double> v) {
  if (c < 0.0) throw DomainError("sylvester_logdet_rank1: c must be non-negative");
  if (c == 0.0) return logdet(l);
  return logdet(l) + std::log1p(c * inverse_quadratic_form(l, v));
}

Vector mat_vec(const SymMatrix& a, std::span<const double> x) {
  require_dim(a.dim(), x.size(), "mat_vec");
  Vector y(a.dim(), 0.0);
  for (std::size_t i = 0; i < a.dim(); ++i)
    for (std::size_t j = 0; j < a.dim(); ++j) y[i] += a(i, j) * x[j];
  return y;
}

Vector lower_mat_vec(const CholeskyFactor& l, std::span<const double> x) {
  require_dim(l.dim(), x.size(), "lower_mat_vec");
  Vector y(l.dim(), 0.0);
  for (std::size_t i = 0; i < l.dim(); ++i)
    for (std::size_t j = 0; j <= i; ++j) y[i] += l(i, j) * x[j];
  return y;
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_dim(a.size(), b.size(), "dot");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace evreg
