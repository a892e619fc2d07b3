#pragma once

// Gaussian / inverse-gamma / inverse-Wishart / NIG / NIW / Student-t family:
// log-densities, sampling, moments, conjugate updates and model evidence.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "evreg/linalg.hpp"
#include "evreg/rng.hpp"

namespace evreg {

/// NIW hyperparameters (μ₀, Ψ, κ, ν). Ψ is held by its Cholesky factor.
struct EvidentialParams {
  Vector mu0;
  CholeskyFactor psi_chol;
  double kappa = 1.0;
  double nu = 1.0;

  /// Builds from the average squared deviation Σ₀, i.e. Ψ = ν·Σ₀.
  static EvidentialParams from_sigma0(Vector mu0, const SymMatrix& sigma0, double kappa, double nu);

  std::size_t dim() const { return mu0.size(); }
  SymMatrix psi() const { return psi_chol.product(); }
  /// Σ₀ = Ψ/ν
  SymMatrix sigma0() const { return psi().scaled(1.0 / nu); }
  /// Throws DimensionMismatch / DomainError on inconsistent fields.
  void validate() const;
};

/// Univariate NIG(μ₀, κ; α, β).
struct NigParams {
  double mu0 = 0.0;
  double kappa = 1.0;
  double alpha = 2.0;
  double beta = 1.0;
};

/// Maps NIG to the n = 1 NIW under ν = 2α, Ψ = 2β.
EvidentialParams to_evidential(const NigParams& p);

struct Moments {
  Vector mean;          // E[μ]
  SymMatrix aleatoric;  // E[Σ]
  SymMatrix epistemic;  // var[μ]
};

double mvn_logpdf(std::span<const double> x, std::span<const double> mu, const CholeskyFactor& sigma_chol);

double inv_gamma_logpdf(double x, double alpha, double beta);

/// Inverse-Wishart W⁻¹(Σ | Ψ, ν), ν > n - 1.
double inv_wishart_logpdf(const SymMatrix& sigma, const CholeskyFactor& psi_chol, double nu);

/// N(μ | μ₀, Σ/κ) · W⁻¹(Σ | Ψ, ν)
double niw_logpdf(std::span<const double> mu, const SymMatrix& sigma, const EvidentialParams& m);

/// Draws Σ ~ W⁻¹(Ψ, ν) by Bartlett-decomposing W(Ψ⁻¹, ν).
SymMatrix sample_inv_wishart(const CholeskyFactor& psi_chol, double nu, RngStream& rng);

/// (μ, Σ) from the hierarchical NIW model.
std::pair<Vector, SymMatrix> sample_niw(const EvidentialParams& m, RngStream& rng);

/// Requires ν > n + 1.
Moments niw_moments(const EvidentialParams& m);
/// Requires α > 1.
Moments nig_moments(const NigParams& p);

/// Conjugate update with m >= 1 observations of dimension n.
EvidentialParams posterior_update(const EvidentialParams& prior, std::span<const Vector> data);

/// Multivariate Student-t log-density t_dof(y | μ, Σ) with Σ = L·Lᵀ.
double mvt_logpdf(std::span<const double> y, double dof, std::span<const double> mu, const CholeskyFactor& scale_chol);

/// log p(y | 𝔪) = log t_{ν-n+1}(y | μ₀, (1+κ)/(κ(ν-n+1))·Ψ), evaluated through
/// the rank-one determinant form. Requires ν > n - 1.
double model_evidence_logpdf(std::span<const double> y, const EvidentialParams& m);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

/// Plain Monte Carlo over (μ, Σ) ~ NIW of N(y | μ, Σ); the integral whose
/// closed form is `model_evidence_logpdf`.
McEstimate model_evidence_mc(std::span<const double> y, const EvidentialParams& m, std::size_t samples,
                             RngStream& rng);

/// Non-standardized Student-t, ν > 0, σ² > 0.
double student_t_logpdf(double x, double nu, double mu, double sigma2);

}  // namespace evreg
