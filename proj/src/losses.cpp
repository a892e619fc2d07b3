#include "evreg/losses.hpp"

#include <cmath>
#include <string>

#include "evreg/errors.hpp"
#include "evreg/special.hpp"

namespace evreg {

namespace {

Vector residual(std::span<const double> y, std::span<const double> mu0) {
  if (y.size() != mu0.size()) {
    throw DimensionMismatch("loss: target dimension " + std::to_string(y.size()) + " vs head dimension " +
                            std::to_string(mu0.size()));
  }
  Vector d(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) d[i] = y[i] - mu0[i];
  return d;
}

void check_nig(const NigParams& p) {
  if (!(p.alpha > 0.0) || !(p.beta > 0.0) || !(p.kappa > 0.0)) {
    throw DomainError("NIG parameters require alpha, beta, kappa > 0");
  }
}

double sign(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

CholeskyFactor CoupledHeadParams::chol() const {
  const std::size_t n = dim();
  if (ell.size() != packed_size(n)) throw DimensionMismatch("CoupledHeadParams: ell has wrong length");
  Vector packed = ell;
  for (std::size_t j = 0; j < n; ++j) packed[packed_index(j, j)] = std::exp(ell[packed_index(j, j)]);
  return CholeskyFactor::from_packed(n, packed);
}

EvidentialParams CoupledHeadParams::to_evidential() const {
  return EvidentialParams{mu0, chol().scaled(nu), kappa(), nu};
}

LossValue gaussian_nll(double y, double mu, double sigma2) {
  if (!(sigma2 > 0.0)) throw DomainError("gaussian_nll: sigma2 must be positive");
  const double d = y - mu;
  LossValue out;
  out.value = 0.5 * std::log(2.0 * kPi * sigma2) + d * d / (2.0 * sigma2);
  out.gradient = {-d / sigma2, 0.5 / sigma2 - d * d / (2.0 * sigma2 * sigma2)};
  return out;
}

LossValue nig_nll(double y, const NigParams& p) {
  check_nig(p);
  const double nu = 2.0 * p.alpha;
  const double scale2 = p.beta * (1.0 + p.kappa) / (p.kappa * p.alpha);
  LossValue out;
  out.value = -student_t_logpdf(y, nu, p.mu0, scale2);

  // Gradients from the expanded form with Ω = 2β(1+κ), D = κ·d² + Ω:
  // ½log(π/κ) - α log Ω + (α+½) log D + logΓ(α) - logΓ(α+½).
  const double d = y - p.mu0;
  const double omega = 2.0 * p.beta * (1.0 + p.kappa);
  const double big_d = p.kappa * d * d + omega;
  const double a_half = p.alpha + 0.5;
  out.gradient = {
      -a_half * 2.0 * p.kappa * d / big_d,
      -0.5 / p.kappa - p.alpha * 2.0 * p.beta / omega + a_half * (d * d + 2.0 * p.beta) / big_d,
      -std::log(omega) + std::log(big_d) + digamma(p.alpha) - digamma(a_half),
      -p.alpha / p.beta + a_half * 2.0 * (1.0 + p.kappa) / big_d,
  };
  return out;
}

double total_evidence(const NigParams& p, EvidenceKind kind) {
  switch (kind) {
    case EvidenceKind::PaperPhi:
      return 2.0 * p.kappa + p.alpha;
    case EvidenceKind::VirtualPhi:
      return p.kappa + 2.0 * p.alpha;
    case EvidenceKind::None:
      break;
  }
  throw DomainError("total_evidence: no evidence kind selected");
}

double total_evidence(const EvidentialParams& m, EvidenceKind kind) {
  if (kind != EvidenceKind::VirtualPhi) {
    throw DomainError("total_evidence: only the virtual-measurement count is defined for NIW");
  }
  return m.kappa + m.nu;
}

LossValue evidence_regularizer(double y, const NigParams& p, const RegularizerConfig& cfg) {
  const double phi = total_evidence(p, cfg.evidence_kind);
  const double d = y - p.mu0;
  const double abs_d = std::abs(d);
  const bool paper = cfg.evidence_kind == EvidenceKind::PaperPhi;
  LossValue out;
  out.value = abs_d * phi;
  out.gradient = {-sign(d) * phi, abs_d * (paper ? 2.0 : 1.0), abs_d * (paper ? 1.0 : 2.0), 0.0};
  return out;
}

LossValue nig_total_loss(double y, const NigParams& p, const RegularizerConfig& cfg) {
  LossValue out = nig_nll(y, p);
  if (cfg.evidence_kind == EvidenceKind::None || cfg.lambda == 0.0) return out;
  const LossValue reg = evidence_regularizer(y, p, cfg);
  out.value += cfg.lambda * reg.value;
  for (std::size_t k = 0; k < out.gradient.size(); ++k) out.gradient[k] += cfg.lambda * reg.gradient[k];
  return out;
}

LossValue niw_nll(std::span<const double> y, const EvidentialParams& m) {
  m.validate();
  const std::size_t n = m.dim();
  const double nd = static_cast<double>(n);
  if (!(m.nu > nd - 1.0)) throw DomainError("niw_nll: nu must exceed n - 1");
  const Vector d = residual(y, m.mu0);
  const double c = m.kappa / (1.0 + m.kappa);
  const CholeskyFactor& l = m.psi_chol;

  LossValue out;
  out.value = log_gamma(0.5 * (m.nu - nd + 1.0)) - log_gamma(0.5 * (m.nu + 1.0)) +
              0.5 * nd * std::log(kPi * (1.0 + m.kappa) / m.kappa) - 0.5 * m.nu * logdet(l) +
              0.5 * (m.nu + 1.0) * sylvester_logdet_rank1(l, c, d);

  // With q = dᵀΨ⁻¹d, u = L⁻¹d, w = Ψ⁻¹d the loss reduces to
  // ... + Σ log L_jj + ((ν+1)/2)·log(1 + c·q).
  const Vector u = forward_solve(l, d);
  const Vector w = backward_solve(l, u);
  const double q = dot(u, u);
  const double denom = 1.0 + c * q;
  const double g = (m.nu + 1.0) * c / denom;

  out.gradient.assign(n + packed_size(n) + 2, 0.0);
  for (std::size_t i = 0; i < n; ++i) out.gradient[i] = -g * w[i];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double v = -g * w[i] * u[j];
      if (i == j) v += 1.0 / l(i, i);
      out.gradient[n + packed_index(i, j)] = v;
    }
  }
  const double dc = 1.0 / ((1.0 + m.kappa) * (1.0 + m.kappa));
  out.gradient[n + packed_size(n)] = -nd / (2.0 * m.kappa * (1.0 + m.kappa)) + 0.5 * (m.nu + 1.0) * q * dc / denom;
  out.gradient[n + packed_size(n) + 1] =
      0.5 * digamma(0.5 * (m.nu - nd + 1.0)) - 0.5 * digamma(0.5 * (m.nu + 1.0)) + 0.5 * std::log1p(c * q);
  return out;
}

LossValue coupled_niw_nll(std::span<const double> y, const CoupledHeadParams& h) {
  const std::size_t n = h.dim();
  const double nd = static_cast<double>(n);
  if (!(h.r > 0.0)) throw DomainError("coupled_niw_nll: r must be positive");
  if (!(h.nu > nd + 1.0) || !std::isfinite(h.nu)) throw DomainError("coupled_niw_nll: nu must exceed n + 1");
  const Vector d = residual(y, h.mu0);
  const CholeskyFactor l = h.chol();
  const double s = h.r + h.nu;

  double diag_sum = 0.0;
  for (std::size_t j = 0; j < n; ++j) diag_sum += h.ell[packed_index(j, j)];

  LossValue out;
  out.value = log_gamma(0.5 * (h.nu - nd + 1.0)) - log_gamma(0.5 * (h.nu + 1.0)) + 0.5 * nd * std::log(s) -
              h.nu * diag_sum + 0.5 * (h.nu + 1.0) * sylvester_logdet_rank1(l, 1.0 / s, d);

  // log|L·Lᵀ + d·dᵀ/s| = 2·Σℓ_jj + log(1 + q/s), so the loss is
  // ... + Σℓ_jj + ((ν+1)/2)·log(1 + q/s) with q = ‖L⁻¹d‖².
  const Vector u = forward_solve(l, d);
  const Vector w = backward_solve(l, u);
  const double q = dot(u, u);
  const double g = (h.nu + 1.0) / (s + q);

  out.gradient.assign(n + packed_size(n) + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) out.gradient[i] = -g * w[i];
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      const double dl = -g * w[i] * u[j];
      out.gradient[n + packed_index(i, j)] = (i == j) ? 1.0 + dl * l(i, i) : dl;
    }
  }
  out.gradient[n + packed_size(n)] = 0.5 * digamma(0.5 * (h.nu - nd + 1.0)) - 0.5 * digamma(0.5 * (h.nu + 1.0)) +
                                     0.5 * nd / s + 0.5 * std::log1p(q / s) - 0.5 * (h.nu + 1.0) * q / (s * (s + q));
  return out;
}

UncertaintyReport uncertainty_from_head(const CoupledHeadParams& h) {
  const double nd = static_cast<double>(h.dim());
  if (!(h.nu > nd + 1.0)) throw DomainError("uncertainty_from_head: nu must exceed n + 1");
  SymMatrix aleatoric = h.chol().product().scaled(h.nu / (h.nu - nd - 1.0));
  SymMatrix epistemic = aleatoric.scaled(1.0 / h.nu);
  return UncertaintyReport{h.mu0, std::move(aleatoric), std::move(epistemic), h.nu};
}

}  // namespace evreg
