#pragma once

// Loss functions with closed-form gradients. Each LossValue carries the
// gradient in the parameter layout documented on the producing function.

#include <cstddef>
#include <span>
#include <vector>

#include "evreg/distributions.hpp"
#include "evreg/linalg.hpp"

namespace evreg {

struct LossValue {
  double value = 0.0;
  std::vector<double> gradient;
};

enum class EvidenceKind {
  None,
  PaperPhi,    // Φ  = 2κ + α
  VirtualPhi,  // Φ' = κ + 2α (univariate), κ + ν (multivariate)
};

struct RegularizerConfig {
  double lambda = 0.0;
  EvidenceKind evidence_kind = EvidenceKind::None;
};

/// Coupled NIW head: κ = ν/r is derived, Ψ = ν·L·Lᵀ with L built from ℓ.
struct CoupledHeadParams {
  Vector mu0;
  /// Packed lower triangle; diagonal slots hold log L_jj.
  Vector ell;
  double nu = 0.0;
  double r = 1.0;

  std::size_t dim() const { return mu0.size(); }
  double kappa() const { return nu / r; }
  CholeskyFactor chol() const;
  /// The equivalent uncoupled parameters (μ₀, ν·L·Lᵀ, ν/r, ν).
  EvidentialParams to_evidential() const;
};

struct UncertaintyReport {
  Vector prediction;
  SymMatrix aleatoric;
  SymMatrix epistemic;
  double nu = 0.0;
};

/// ½log(2πσ²) + (y-μ)²/(2σ²). Gradient layout: (μ, σ²).
LossValue gaussian_nll(double y, double mu, double sigma2);

/// -log St_{2α}(y | μ₀, β(1+κ)/(κα)). Gradient layout: (μ₀, κ, α, β).
LossValue nig_nll(double y, const NigParams& p);

double total_evidence(const NigParams& p, EvidenceKind kind);
/// Multivariate total evidence; only VirtualPhi (κ + ν) is defined.
double total_evidence(const EvidentialParams& m, EvidenceKind kind);

/// |y - μ₀|·Φ, without the coupling λ. Gradient layout: (μ₀, κ, α, β); the
/// subgradient of |·| at zero is taken as 0.
LossValue evidence_regularizer(double y, const NigParams& p, const RegularizerConfig& cfg);

/// nig_nll + λ·evidence_regularizer (regularizer skipped for None).
LossValue nig_total_loss(double y, const NigParams& p, const RegularizerConfig& cfg);

/// -log p(y | 𝔪). Gradient layout: (μ₀[n], packed Cholesky entries of Ψ
/// [n(n+1)/2], κ, ν). Requires ν > n - 1.
LossValue niw_nll(std::span<const double> y, const EvidentialParams& m);

/// Multivariate NLL under ν = rκ and Ψ = ν·L·Lᵀ with the additive constant
/// (n/2)·log π dropped. Gradient layout: (μ₀[n], ℓ[n(n+1)/2], ν).
/// Requires ν > n + 1 and r > 0.
LossValue coupled_niw_nll(std::span<const double> y, const CoupledHeadParams& h);

/// Prediction μ₀, aleatoric ν/(ν-n-1)·L·Lᵀ and epistemic aleatoric/ν. The
/// global scale is unidentifiable under the coupling; the proportionality
/// constant is fixed to 1 (the true epistemic term carries an extra r).
UncertaintyReport uncertainty_from_head(const CoupledHeadParams& h);

}  // namespace evreg
