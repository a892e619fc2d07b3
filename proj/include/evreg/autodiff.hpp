#pragma once

// Scalar reverse-mode automatic differentiation on an explicit tape.
//
//   ad::Tape tape;
//   ad::Var x = tape.variable(2.0);
//   ad::Var y = x * ad::log(x);
//   std::vector<double> g = tape.gradient(y);   // g[x.index()] == log 2 + 1

#include <cstddef>
#include <span>
#include <vector>

namespace evreg::ad {

class Tape;

class Var {
 public:
  Var() = default;
  double value() const;
  std::size_t index() const { return index_; }
  Tape* tape() const { return tape_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t index) : tape_(tape), index_(index) {}

  Tape* tape_ = nullptr;
  std::size_t index_ = 0;
};

class Tape {
 public:
  Var variable(double value);
  /// Records a node with up to two parents and the local partials.
  Var push(double value, const Var* a, double da, const Var* b, double db);

  double value(const Var& v) const { return nodes_[v.index()].value; }
  std::size_t size() const { return nodes_.size(); }
  /// d(output)/d(node) for every node on the tape.
  std::vector<double> gradient(const Var& output) const;

 private:
  struct Node {
    double value;
    std::size_t parent[2];
    double partial[2];
    int arity;
  };
  std::vector<Node> nodes_;
};

Var operator+(const Var& a, const Var& b);
Var operator-(const Var& a, const Var& b);
Var operator*(const Var& a, const Var& b);
Var operator/(const Var& a, const Var& b);
Var operator-(const Var& a);
Var operator+(const Var& a, double b);
Var operator+(double a, const Var& b);
Var operator-(const Var& a, double b);
Var operator-(double a, const Var& b);
Var operator*(const Var& a, double b);
Var operator*(double a, const Var& b);
Var operator/(const Var& a, double b);
Var operator/(double a, const Var& b);

Var log(const Var& a);
Var exp(const Var& a);
Var sqrt(const Var& a);
Var tanh(const Var& a);
Var log_gamma(const Var& a);

/// Coupled NIW negative log-likelihood recorded on the tape. Uses the
/// explicit matrix L·Lᵀ + d·dᵀ/(r+ν) and its Cholesky log-determinant rather
/// than the rank-one identity, so it is an independent route to both the
/// value and the gradient of `evreg::coupled_niw_nll`.
Var coupled_niw_nll(Tape& tape, std::span<const double> y, std::span<const Var> mu0, std::span<const Var> ell,
                    const Var& nu, double r);

}  // namespace evreg::ad
