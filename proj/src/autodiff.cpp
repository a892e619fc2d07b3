#include "evreg/autodiff.hpp"

#include <cassert>
#include <cmath>

#include "evreg/errors.hpp"
#include "evreg/linalg.hpp"
#include "evreg/special.hpp"

namespace evreg::ad {

double Var::value() const { return tape_->value(*this); }

Var Tape::variable(double value) { return push(value, nullptr, 0.0, nullptr, 0.0); }

Var Tape::push(double value, const Var* a, double da, const Var* b, double db) {
  Node node{value, {0, 0}, {0.0, 0.0}, 0};
  if (a) {
    node.parent[node.arity] = a->index();
    node.partial[node.arity] = da;
    ++node.arity;
  }
  if (b) {
    node.parent[node.arity] = b->index();
    node.partial[node.arity] = db;
    ++node.arity;
  }
  nodes_.push_back(node);
  return Var(this, nodes_.size() - 1);
}

std::vector<double> Tape::gradient(const Var& output) const {
  std::vector<double> adj(nodes_.size(), 0.0);
  adj[output.index()] = 1.0;
  for (std::size_t k = output.index() + 1; k-- > 0;) {
    const Node& node = nodes_[k];
    if (adj[k] == 0.0) continue;
    for (int p = 0; p < node.arity; ++p) adj[node.parent[p]] += adj[k] * node.partial[p];
  }
  return adj;
}

namespace {

Tape& tape_of(const Var& a) {
  assert(a.tape() != nullptr);
  return *a.tape();
}

}  // namespace

Var operator+(const Var& a, const Var& b) { return tape_of(a).push(a.value() + b.value(), &a, 1.0, &b, 1.0); }
Var operator-(const Var& a, const Var& b) { return tape_of(a).push(a.value() - b.value(), &a, 1.0, &b, -1.0); }
Var operator*(const Var& a, const Var& b) {
  return tape_of(a).push(a.value() * b.value(), &a, b.value(), &b, a.value());
}
Var operator/(const Var& a, const Var& b) {
  const double bv = b.value();
  return tape_of(a).push(a.value() / bv, &a, 1.0 / bv, &b, -a.value() / (bv * bv));
}
Var operator-(const Var& a) { return tape_of(a).push(-a.value(), &a, -1.0, nullptr, 0.0); }
Var operator+(const Var& a, double b) { return tape_of(a).push(a.value() + b, &a, 1.0, nullptr, 0.0); }
Var operator+(double a, const Var& b) { return b + a; }
Var operator-(const Var& a, double b) { return tape_of(a).push(a.value() - b, &a, 1.0, nullptr, 0.0); }
Var operator-(double a, const Var& b) { return tape_of(b).push(a - b.value(), &b, -1.0, nullptr, 0.0); }
Var operator*(const Var& a, double b) { return tape_of(a).push(a.value() * b, &a, b, nullptr, 0.0); }
Var operator*(double a, const Var& b) { return b * a; }
Var operator/(const Var& a, double b) { return tape_of(a).push(a.value() / b, &a, 1.0 / b, nullptr, 0.0); }
Var operator/(double a, const Var& b) {
  const double bv = b.value();
  return tape_of(b).push(a / bv, &b, -a / (bv * bv), nullptr, 0.0);
}

Var log(const Var& a) { return tape_of(a).push(std::log(a.value()), &a, 1.0 / a.value(), nullptr, 0.0); }
Var exp(const Var& a) {
  const double e = std::exp(a.value());
  return tape_of(a).push(e, &a, e, nullptr, 0.0);
}
Var sqrt(const Var& a) {
  const double s = std::sqrt(a.value());
  return tape_of(a).push(s, &a, 0.5 / s, nullptr, 0.0);
}
Var tanh(const Var& a) {
  const double t = std::tanh(a.value());
  return tape_of(a).push(t, &a, 1.0 - t * t, nullptr, 0.0);
}
Var log_gamma(const Var& a) {
  return tape_of(a).push(evreg::log_gamma(a.value()), &a, evreg::digamma(a.value()), nullptr, 0.0);
}

Var coupled_niw_nll(Tape& tape, std::span<const double> y, std::span<const Var> mu0, std::span<const Var> ell,
                    const Var& nu, double r) {
  const std::size_t n = mu0.size();
  if (y.size() != n || ell.size() != packed_size(n)) throw DimensionMismatch("ad::coupled_niw_nll: bad sizes");
  const double nd = static_cast<double>(n);

  std::vector<Var> l(n * n);
  const Var zero = tape.variable(0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (j > i) l[i * n + j] = zero;
      else if (i == j) l[i * n + j] = exp(ell[packed_index(i, i)]);
      else l[i * n + j] = ell[packed_index(i, j)];
    }
  }
  std::vector<Var> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = y[i] - mu0[i];
  const Var s = nu + r;

  // M = L·Lᵀ + d·dᵀ/s, lower triangle.
  std::vector<Var> m(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      Var acc = d[i] * d[j] / s;
      for (std::size_t k = 0; k <= j; ++k) acc = acc + l[i * n + k] * l[j * n + k];
      m[i * n + j] = acc;
    }
  }
  // log|M| from its own Cholesky factorization.
  std::vector<Var> c(n * n);
  Var log_det = zero;
  for (std::size_t j = 0; j < n; ++j) {
    Var pivot = m[j * n + j];
    for (std::size_t k = 0; k < j; ++k) pivot = pivot - c[j * n + k] * c[j * n + k];
    c[j * n + j] = sqrt(pivot);
    log_det = log_det + log(pivot);
    for (std::size_t i = j + 1; i < n; ++i) {
      Var v = m[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v = v - c[i * n + k] * c[j * n + k];
      c[i * n + j] = v / c[j * n + j];
    }
  }

  Var diag_sum = zero;
  for (std::size_t j = 0; j < n; ++j) diag_sum = diag_sum + ell[packed_index(j, j)];

  return log_gamma((nu - nd + 1.0) * 0.5) - log_gamma((nu + 1.0) * 0.5) + 0.5 * nd * log(s) - nu * diag_sum +
         (nu + 1.0) * 0.5 * log_det;
}

}  // namespace evreg::ad
