#pragma once

// Reproducible studies: the (β, κ) degeneration scan, the Student-t fit bias
// pseudo-experiment and the ∨-circle ensemble.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "evreg/dataset.hpp"
#include "evreg/net.hpp"
#include "evreg/rng.hpp"

namespace evreg {

// ---------------------------------------------------------------- degeneration

struct DegenerationRow {
  double kappa = 0.0;
  double beta = 0.0;
  double nll = 0.0;
  /// nll + λ·|y-μ₀|·(2κ + α)
  double total_paper = 0.0;
  /// nll + λ·|y-μ₀|·(κ + 2α)
  double total_virtual = 0.0;
};

/// For each κ sets β = product·κ/(1+κ), so β(1+κ)/κ stays fixed, and
/// evaluates the NIG NLL at y - μ₀ = `y_minus_mu0`.
std::vector<DegenerationRow> degeneration_scan(double alpha, double y_minus_mu0, double product,
                                               std::span<const double> kappa_grid, double lambda = 1.0);

std::vector<double> log_grid(double lo, double hi, std::size_t count);
std::vector<double> uniform_grid(double lo, double hi, std::size_t count);

// ------------------------------------------------------------------ t fitting

struct TFitBounds {
  double nu_lo = 0.5;
  double nu_hi = 100.0;
};

struct TFit {
  double nu = 0.0;
  double mu = 0.0;
  double sigma2 = 0.0;
  double log_likelihood = 0.0;
  bool converged = false;
};

double student_t_loglik(std::span<const double> samples, double nu, double mu, double sigma2);

/// Maximum likelihood over (ν, μ, σ²): projected BFGS in (log ν, μ, log σ²)
/// from five starting values of ν. Throws FitDiverged if no start converges.
TFit fit_student_t(std::span<const double> samples, const TFitBounds& bounds = {});

struct BiasStudyConfig {
  double gt_nu = 3.0;
  double gt_mu = 0.0;
  double gt_sigma2 = 1.0;
  std::vector<std::size_t> sample_sizes{20, 50, 100, 200, 500, 1000};
  std::size_t repetitions = 200;
  TFitBounds bounds;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  void validate() const;
};

struct QuantileTriple {
  double q16 = 0.0;
  double median = 0.0;
  double q84 = 0.0;
};

struct ResidualRow {
  std::size_t sample_size = 0;
  QuantileTriple nu;
  QuantileTriple mu;
  QuantileTriple sigma2;
  /// Median of |fitted ν - GT ν|.
  double median_abs_nu = 0.0;
  /// Interquartile range of the μ residual.
  double iqr_mu = 0.0;
  std::size_t fits = 0;
  std::size_t diverged = 0;
};

struct ResidualTable {
  std::vector<ResidualRow> rows;
};

/// Linear interpolation between order statistics (type 7).
double quantile(std::vector<double> values, double q);

ResidualTable bias_study(const BiasStudyConfig& cfg);

// ------------------------------------------------------------------- ensemble

struct EnsembleConfig {
  std::size_t models = 20;
  NetworkConfig network;
  /// Full batch Adam; the circle fit is still far from its plateau at 2000 epochs.
  TrainConfig train{.epochs = 10000};
  std::vector<double> eval_grid;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

struct GridPrediction {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
  double nu = 0.0;
  double cov_xx = 0.0;
  double cov_xy = 0.0;
  double cov_yy = 0.0;
  double corr = 0.0;
};

struct ModelCurve {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  bool converged = false;
  double final_loss = 0.0;
  ModelState model;
  std::vector<GridPrediction> points;
};

struct EnsembleResult {
  std::vector<double> grid;
  std::vector<ModelCurve> models;
  std::size_t failed = 0;
};

GridPrediction evaluate_point(const ModelState& model, double t);

/// Trains `models` networks from independent seeds on the same data and
/// evaluates each on the grid. Models whose loss turns non-finite are kept
/// with converged = false and counted in `failed`.
EnsembleResult circle_ensemble(const Dataset& data, const EnsembleConfig& cfg);

struct CurveRow {
  double t = 0.0;
  std::vector<double> per_model;
  double median = 0.0;
};

/// corr(x, y) from the aleatoric covariance of every converged model.
std::vector<CurveRow> correlation_curve(const EnsembleResult& result);
std::vector<CurveRow> nu_curve(const EnsembleResult& result);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

/// Percentile bootstrap interval of the median.
Interval bootstrap_median_ci(std::span<const double> values, std::size_t resamples, double level, RngStream& rng);

// ------------------------------------------------------------------------ io

void write_degeneration_csv(const std::vector<DegenerationRow>& rows, const std::filesystem::path& path);
void write_residual_csv(const ResidualTable& table, const std::filesystem::path& path);
void write_ensemble_csv(const EnsembleResult& result, const std::filesystem::path& path);
void write_curve_csv(const std::vector<CurveRow>& rows, const std::filesystem::path& path, const char* value_name);
/// Writes `json` to path, creating parent directories.
void write_json(const nlohmann::json& json, const std::filesystem::path& path);

}  // namespace evreg
