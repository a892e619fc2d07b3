#include "evreg/datagen.hpp"

#include <cmath>

#include "evreg/errors.hpp"
#include "evreg/special.hpp"

namespace evreg {

namespace {

constexpr const char* kCircleGenerator = "vee_circle";

}  // namespace

void CircleConfig::validate() const {
  if (count < 1) throw DomainError("count must be at least 1");
  if (!(radial_noise >= 0.0) || !std::isfinite(radial_noise)) throw DomainError("radial noise must be non-negative");
}

double vee_density_pdf(double t) {
  if (t < 0.0 || t > 2.0 * kPi) return 0.0;
  return std::abs(t - kPi) / (kPi * kPi);
}

double vee_density_cdf(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 2.0 * kPi) return 1.0;
  // F(t) = (πt - t²/2)/π² on [0, π]; symmetric about π.
  const auto left = [](double s) { return (kPi * s - 0.5 * s * s) / (kPi * kPi); };
  return t <= kPi ? left(t) : 1.0 - left(2.0 * kPi - t);
}

double sample_vee(RngStream& rng) {
  const double u = rng.uniform();
  if (u <= 0.5) return kPi * (1.0 - std::sqrt(1.0 - 2.0 * u));
  return kPi * (1.0 + std::sqrt(2.0 * u - 1.0));
}

Dataset circle_dataset(const CircleConfig& cfg) {
  cfg.validate();
  RngStream rng(cfg.seed);
  Dataset data;
  data.n = 2;
  data.records.reserve(cfg.count);
  for (std::size_t i = 0; i < cfg.count; ++i) {
    const double t = sample_vee(rng);
    const double radius = 1.0 + cfg.radial_noise * rng.normal();
    data.records.push_back(Record{t, {radius * std::cos(t), radius * std::sin(t)}});
  }
  data.provenance.generator = kCircleGenerator;
  data.provenance.params = {{"count", static_cast<double>(cfg.count)}, {"radial_noise", cfg.radial_noise}};
  data.provenance.seed = cfg.seed;
  return data;
}

Dataset regenerate(const Provenance& provenance) {
  if (provenance.generator != kCircleGenerator) {
    throw DomainError("regenerate: unknown generator '" + provenance.generator + "'");
  }
  CircleConfig cfg;
  cfg.count = static_cast<std::size_t>(provenance.params.at("count"));
  cfg.radial_noise = provenance.params.at("radial_noise");
  cfg.seed = provenance.seed;
  return circle_dataset(cfg);
}

SymMatrix true_covariance(double t, double sigma_r2) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  SymMatrix cov(2);
  cov.set(0, 0, sigma_r2 * c * c);
  cov.set(1, 0, sigma_r2 * s * c);
  cov.set(1, 1, sigma_r2 * s * s);
  return cov;
}

std::optional<int> true_correlation_sign(double t) {
  const double quarter = t / (0.5 * kPi);
  if (std::abs(quarter - std::round(quarter)) < 1e-12) return std::nullopt;
  return std::sin(2.0 * t) > 0.0 ? 1 : -1;
}

std::vector<double> student_t_samples(double nu, double mu, double sigma2, std::size_t count, RngStream& rng) {
  if (!(nu > 0.0)) throw DomainError("student_t_samples: nu must be positive");
  if (!(sigma2 > 0.0)) throw DomainError("student_t_samples: sigma2 must be positive");
  const double sigma = std::sqrt(sigma2);
  std::vector<double> out(count);
  for (double& x : out) {
    const double z = rng.normal();
    const double chi2 = rng.chi_squared(nu);
    x = mu + sigma * z / std::sqrt(chi2 / nu);
  }
  return out;
}

}  // namespace evreg
