#include "evreg/distributions.hpp"

#include <cmath>
#include <string>

#include "evreg/errors.hpp"
#include "evreg/special.hpp"

namespace evreg {

namespace {

void require_same(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    throw DimensionMismatch(std::string(what) + ": dimension " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

Vector difference(std::span<const double> a, std::span<const double> b) {
  Vector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

EvidentialParams EvidentialParams::from_sigma0(Vector mu0, const SymMatrix& sigma0, double kappa, double nu) {
  EvidentialParams m{std::move(mu0), cholesky(sigma0.scaled(nu)), kappa, nu};
  m.validate();
  return m;
}

void EvidentialParams::validate() const {
  require_same(mu0.size(), psi_chol.dim(), "EvidentialParams");
  if (mu0.empty()) throw DimensionMismatch("EvidentialParams: dimension must be positive");
  if (!(kappa > 0.0) || !std::isfinite(kappa)) throw DomainError("EvidentialParams: kappa must be positive");
  if (!std::isfinite(nu)) throw DomainError("EvidentialParams: nu must be finite");
  for (double v : mu0)
    if (!std::isfinite(v)) throw DomainError("EvidentialParams: mu0 must be finite");
}

EvidentialParams to_evidential(const NigParams& p) {
  if (!(p.beta > 0.0)) throw DomainError("NigParams: beta must be positive");
  const double psi = 2.0 * p.beta;
  return EvidentialParams{{p.mu0}, CholeskyFactor::from_lower(1, std::vector<double>{std::sqrt(psi)}), p.kappa,
                          2.0 * p.alpha};
}

double mvn_logpdf(std::span<const double> x, std::span<const double> mu, const CholeskyFactor& sigma_chol) {
  require_same(x.size(), mu.size(), "mvn_logpdf");
  require_same(x.size(), sigma_chol.dim(), "mvn_logpdf");
  const Vector d = difference(x, mu);
  const double n = static_cast<double>(x.size());
  return -0.5 * n * kLog2Pi - 0.5 * logdet(sigma_chol) - 0.5 * inverse_quadratic_form(sigma_chol, d);
}

double inv_gamma_logpdf(double x, double alpha, double beta) {
  if (!(x > 0.0)) throw DomainError("inv_gamma_logpdf: x must be positive");
  if (!(alpha > 0.0) || !(beta > 0.0)) throw DomainError("inv_gamma_logpdf: alpha and beta must be positive");
  return alpha * std::log(beta) - log_gamma(alpha) - (alpha + 1.0) * std::log(x) - beta / x;
}

double inv_wishart_logpdf(const SymMatrix& sigma, const CholeskyFactor& psi_chol, double nu) {
  const std::size_t n = sigma.dim();
  require_same(n, psi_chol.dim(), "inv_wishart_logpdf");
  const double nd = static_cast<double>(n);
  if (!(nu > nd - 1.0)) throw DomainError("inv_wishart_logpdf: nu must exceed n - 1");
  const CholeskyFactor sigma_chol = cholesky(sigma);
  // tr(Ψ Σ⁻¹) = ‖C⁻¹L‖²_F with Σ = C·Cᵀ, Ψ = L·Lᵀ.
  double trace = 0.0;
  Vector col(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) col[i] = psi_chol(i, j);
    const Vector z = forward_solve(sigma_chol, col);
    trace += dot(z, z);
  }
  return 0.5 * nu * logdet(psi_chol) - 0.5 * nu * nd * std::log(2.0) - log_multigamma(static_cast<int>(n), 0.5 * nu) -
         0.5 * (nu + nd + 1.0) * logdet(sigma_chol) - 0.5 * trace;
}

double niw_logpdf(std::span<const double> mu, const SymMatrix& sigma, const EvidentialParams& m) {
  const CholeskyFactor mean_cov = cholesky(sigma.scaled(1.0 / m.kappa));
  return mvn_logpdf(mu, m.mu0, mean_cov) + inv_wishart_logpdf(sigma, m.psi_chol, m.nu);
}

SymMatrix sample_inv_wishart(const CholeskyFactor& psi_chol, double nu, RngStream& rng) {
  const std::size_t n = psi_chol.dim();
  if (!(nu > static_cast<double>(n) - 1.0)) throw DomainError("sample_inv_wishart: nu must exceed n - 1");
  // W = L⁻ᵀ A Aᵀ L⁻¹ ~ W(Ψ⁻¹, ν) with Bartlett factor A, hence
  // Σ = W⁻¹ = (L A⁻ᵀ)(L A⁻ᵀ)ᵀ.
  std::vector<double> a(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    a[i * n + i] = std::sqrt(rng.chi_squared(nu - static_cast<double>(i)));
    for (std::size_t j = 0; j < i; ++j) a[i * n + j] = rng.normal();
  }
  const CholeskyFactor bartlett = CholeskyFactor::from_lower(n, a);
  // B·Aᵀ = L, so each row b_i of B solves A·b_i = (row i of L).
  std::vector<double> b(n * n, 0.0);
  Vector row(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t k = 0; k < n; ++k) row[k] = psi_chol(i, k);
    const Vector x = forward_solve(bartlett, row);
    for (std::size_t k = 0; k < n; ++k) b[i * n + k] = x[k];
  }
  SymMatrix sigma(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) s += b[i * n + k] * b[j * n + k];
      sigma.set(i, j, s);
    }
  }
  return sigma;
}

std::pair<Vector, SymMatrix> sample_niw(const EvidentialParams& m, RngStream& rng) {
  SymMatrix sigma = sample_inv_wishart(m.psi_chol, m.nu, rng);
  const CholeskyFactor c = cholesky(sigma);
  const std::size_t n = m.dim();
  Vector z(n);
  for (double& v : z) v = rng.normal();
  Vector mu = lower_mat_vec(c, z);
  const double s = 1.0 / std::sqrt(m.kappa);
  for (std::size_t i = 0; i < n; ++i) mu[i] = m.mu0[i] + s * mu[i];
  return {std::move(mu), std::move(sigma)};
}

Moments niw_moments(const EvidentialParams& m) {
  m.validate();
  const double nd = static_cast<double>(m.dim());
  if (!(m.nu > nd + 1.0)) throw DomainError("niw_moments: moments require nu > n + 1");
  SymMatrix aleatoric = m.psi().scaled(1.0 / (m.nu - nd - 1.0));
  SymMatrix epistemic = aleatoric.scaled(1.0 / m.kappa);
  return Moments{m.mu0, std::move(aleatoric), std::move(epistemic)};
}

Moments nig_moments(const NigParams& p) {
  if (!(p.alpha > 1.0)) throw DomainError("nig_moments: moments require alpha > 1");
  if (!(p.kappa > 0.0) || !(p.beta > 0.0)) throw DomainError("nig_moments: kappa and beta must be positive");
  const double var = p.beta / (p.alpha - 1.0);
  return Moments{{p.mu0}, SymMatrix::diagonal(std::vector<double>{var}),
                 SymMatrix::diagonal(std::vector<double>{var / p.kappa})};
}

EvidentialParams posterior_update(const EvidentialParams& prior, std::span<const Vector> data) {
  prior.validate();
  const std::size_t n = prior.dim();
  if (data.empty()) throw DimensionMismatch("posterior_update: at least one observation required");
  for (const Vector& y : data) require_same(n, y.size(), "posterior_update");

  const double m = static_cast<double>(data.size());
  Vector mean(n, 0.0);
  for (const Vector& y : data)
    for (std::size_t i = 0; i < n; ++i) mean[i] += y[i];
  for (double& v : mean) v /= m;

  SymMatrix scatter(n);
  for (const Vector& y : data) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        scatter.set(i, j, scatter(i, j) + (y[i] - mean[i]) * (y[j] - mean[j]));
  }

  const double kappa_post = prior.kappa + m;
  Vector mu_post(n);
  for (std::size_t i = 0; i < n; ++i) mu_post[i] = (prior.kappa * prior.mu0[i] + m * mean[i]) / kappa_post;

  const Vector shift = difference(prior.mu0, mean);
  const SymMatrix psi_post =
      prior.psi().plus(scatter).plus(SymMatrix::outer(shift, m * prior.kappa / kappa_post));
  return EvidentialParams{std::move(mu_post), cholesky(psi_post), kappa_post, prior.nu + m};
}

double mvt_logpdf(std::span<const double> y, double dof, std::span<const double> mu, const CholeskyFactor& scale_chol) {
  require_same(y.size(), mu.size(), "mvt_logpdf");
  require_same(y.size(), scale_chol.dim(), "mvt_logpdf");
  if (!(dof > 0.0)) throw DomainError("mvt_logpdf: degrees of freedom must be positive");
  const double n = static_cast<double>(y.size());
  const double q = inverse_quadratic_form(scale_chol, difference(y, mu));
  return log_gamma(0.5 * (dof + n)) - log_gamma(0.5 * dof) - 0.5 * n * std::log(dof * kPi) -
         0.5 * logdet(scale_chol) - 0.5 * (dof + n) * std::log1p(q / dof);
}

double model_evidence_logpdf(std::span<const double> y, const EvidentialParams& m) {
  m.validate();
  require_same(y.size(), m.dim(), "model_evidence_logpdf");
  const double n = static_cast<double>(m.dim());
  if (!(m.nu > n - 1.0)) throw DomainError("model_evidence_logpdf: nu must exceed n - 1");
  const double c = m.kappa / (1.0 + m.kappa);
  const Vector d = difference(y, m.mu0);
  const double log_psi = logdet(m.psi_chol);
  const double log_updated = sylvester_logdet_rank1(m.psi_chol, c, d);
  return log_gamma(0.5 * (m.nu + 1.0)) - log_gamma(0.5 * (m.nu - n + 1.0)) +
         0.5 * n * (std::log(c) - kLogPi) - 0.5 * log_psi - 0.5 * (m.nu + 1.0) * (log_updated - log_psi);
}

McEstimate model_evidence_mc(std::span<const double> y, const EvidentialParams& m, std::size_t samples,
                             RngStream& rng) {
  m.validate();
  require_same(y.size(), m.dim(), "model_evidence_mc");
  if (samples < 2) throw DomainError("model_evidence_mc: need at least two samples");
  // Welford accumulation of the integrand.
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t k = 0; k < samples; ++k) {
    const auto [mu, sigma] = sample_niw(m, rng);
    const double v = std::exp(mvn_logpdf(y, mu, cholesky(sigma)));
    const double delta = v - mean;
    mean += delta / static_cast<double>(k + 1);
    m2 += delta * (v - mean);
  }
  const double var = m2 / static_cast<double>(samples - 1);
  return McEstimate{mean, std::sqrt(var / static_cast<double>(samples))};
}

double student_t_logpdf(double x, double nu, double mu, double sigma2) {
  if (!(nu > 0.0) || !(sigma2 > 0.0)) throw DomainError("student_t_logpdf: nu and sigma2 must be positive");
  const double z2 = (x - mu) * (x - mu) / sigma2;
  return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * kPi * sigma2) -
         0.5 * (nu + 1.0) * std::log1p(z2 / nu);
}

}  // namespace evreg
