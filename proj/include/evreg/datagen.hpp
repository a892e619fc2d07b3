#pragma once

// Seeded synthetic data: the ∨-density unit circle, Student-t samples and
// the ground-truth covariance of the circle map.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "evreg/dataset.hpp"
#include "evreg/linalg.hpp"
#include "evreg/rng.hpp"

namespace evreg {

struct CircleConfig {
  std::size_t count = 300;
  /// Standard deviation of the radial noise ε.
  double radial_noise = 0.1;
  std::uint64_t seed = 0;

  void validate() const;
};

/// f(t) = |t - π|/π² on [0, 2π], zero elsewhere.
double vee_density_pdf(double t);
double vee_density_cdf(double t);

/// Inverse-CDF draw from the ∨ density.
double sample_vee(RngStream& rng);

/// Records (t, ((1+ε)cos t, (1+ε)sin t)) with t ~ ∨, ε ~ N(0, radial_noise²).
Dataset circle_dataset(const CircleConfig& cfg);

/// Rebuilds a dataset from its provenance block.
Dataset regenerate(const Provenance& provenance);

/// J_f·diag(σ_r², 0)·J_fᵀ for the polar map at φ = t.
SymMatrix true_covariance(double t, double sigma_r2);

/// +1 / -1 piecewise on the quadrants; empty at multiples of π/2.
std::optional<int> true_correlation_sign(double t);

/// μ + σ·Z/√(χ²_ν/ν).
std::vector<double> student_t_samples(double nu, double mu, double sigma2, std::size_t count, RngStream& rng);

}  // namespace evreg
