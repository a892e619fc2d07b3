#pragma once

namespace evreg {

/// log Γ(x) for x > 0 (Lanczos, g = 7). Thread-safe, unlike ::lgamma.
double log_gamma(double x);

/// ψ(x) = d/dx log Γ(x) for x > 0.
double digamma(double x);

/// log Γ_n(a), the multivariate gamma function, for a > (n-1)/2.
double log_multigamma(int n, double a);

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kLogPi = 1.14472988584940017414;
inline constexpr double kLog2Pi = 1.83787706640934548356;

}  // namespace evreg
