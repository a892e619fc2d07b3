#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "evreg/distributions.hpp"
#include "evreg/linalg.hpp"
#include "evreg/rng.hpp"

namespace testing {

using evreg::Vector;

inline evreg::SymMatrix random_spd(std::size_t n, evreg::RngStream& rng, double ridge = 0.0) {
  // MᵀM + (n + ridge)·I
  std::vector<double> m(n * n);
  for (double& v : m) v = rng.normal();
  evreg::SymMatrix a(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += m[k * n + i] * m[k * n + j];
      if (i == j) s += static_cast<double>(n) + ridge;
      a.set(i, j, s);
    }
  }
  return a;
}

inline evreg::EvidentialParams random_niw(std::size_t n, evreg::RngStream& rng) {
  evreg::EvidentialParams m;
  m.mu0.resize(n);
  for (double& v : m.mu0) v = rng.normal();
  m.psi_chol = evreg::cholesky(random_spd(n, rng).scaled(0.5));
  m.kappa = 0.5 + 4.5 * rng.uniform();
  m.nu = static_cast<double>(n) + 2.0 + 8.0 * rng.uniform();
  return m;
}

inline std::vector<double> central_difference(const std::function<double(const Vector&)>& f, const Vector& x,
                                              double step = 1e-5) {
  std::vector<double> g(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = step * std::max(1.0, std::abs(x[i]));
    Vector up = x;
    Vector dn = x;
    up[i] += h;
    dn[i] -= h;
    g[i] = (f(up) - f(dn)) / (2.0 * h);
  }
  return g;
}

/// max_i |a_i - b_i| / max(1, |a_i|, |b_i|)
inline double max_rel_error(const std::vector<double>& a, const std::vector<double>& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max({1.0, std::abs(a[i]), std::abs(b[i])});
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

/// Determinant by cofactor expansion, independent of any factorization.
inline double cofactor_det(const std::vector<double>& a, std::size_t n) {
  if (n == 1) return a[0];
  double det = 0.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::vector<double> minor;
    for (std::size_t i = 1; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (j != c) minor.push_back(a[i * n + j]);
    det += ((c % 2 == 0) ? 1.0 : -1.0) * a[c] * cofactor_det(minor, n - 1);
  }
  return det;
}

inline std::vector<double> dense(const evreg::SymMatrix& m) {
  std::vector<double> out(m.dim() * m.dim());
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i * m.dim() + j] = m(i, j);
  return out;
}

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels % 2) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double s = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) s += f(a + h * static_cast<double>(i)) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

}  // namespace testing
