#include "evreg/experiments.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "evreg/datagen.hpp"
#include "evreg/errors.hpp"
#include "evreg/losses.hpp"
#include "evreg/special.hpp"

namespace evreg {

namespace {

// Runs body(i) for i in [0, count) on up to `jobs` threads. Results must be
// written by index so the output does not depend on scheduling.
template <typename Body>
void parallel_for(std::size_t count, std::size_t jobs, Body body) {
  jobs = std::max<std::size_t>(1, std::min(jobs, count));
  if (jobs == 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> workers;
  for (std::size_t w = 0; w < jobs; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : workers) t.join();
  if (error) std::rethrow_exception(error);
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

double median_of(std::vector<double> v) { return quantile(std::move(v), 0.5); }

}  // namespace

// ---------------------------------------------------------------- degeneration

std::vector<DegenerationRow> degeneration_scan(double alpha, double y_minus_mu0, double product,
                                               std::span<const double> kappa_grid, double lambda) {
  if (!(product > 0.0)) throw DomainError("degeneration_scan: product must be positive");
  const RegularizerConfig paper{lambda, EvidenceKind::PaperPhi};
  const RegularizerConfig virt{lambda, EvidenceKind::VirtualPhi};
  std::vector<DegenerationRow> rows;
  rows.reserve(kappa_grid.size());
  for (double kappa : kappa_grid) {
    if (!(kappa > 0.0)) throw DomainError("degeneration_scan: kappa grid must be positive");
    const NigParams p{0.0, kappa, alpha, product * kappa / (1.0 + kappa)};
    DegenerationRow row;
    row.kappa = kappa;
    row.beta = p.beta;
    row.nll = nig_nll(y_minus_mu0, p).value;
    row.total_paper = nig_total_loss(y_minus_mu0, p, paper).value;
    row.total_virtual = nig_total_loss(y_minus_mu0, p, virt).value;
    rows.push_back(row);
  }
  return rows;
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  if (!(lo > 0.0) || !(hi > lo) || count < 2) throw DomainError("log_grid: need 0 < lo < hi and count >= 2");
  std::vector<double> g(count);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) g[i] = std::exp(a + (b - a) * static_cast<double>(i) / (count - 1.0));
  return g;
}

std::vector<double> uniform_grid(double lo, double hi, std::size_t count) {
  if (!(hi > lo) || count < 2) throw DomainError("uniform_grid: need lo < hi and count >= 2");
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) g[i] = lo + (hi - lo) * static_cast<double>(i) / (count - 1.0);
  return g;
}

// ------------------------------------------------------------------ t fitting

double student_t_loglik(std::span<const double> samples, double nu, double mu, double sigma2) {
  const double count = static_cast<double>(samples.size());
  double tail = 0.0;
  for (double x : samples) tail += std::log1p((x - mu) * (x - mu) / (nu * sigma2));
  return count * (log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * kPi * sigma2)) -
         0.5 * (nu + 1.0) * tail;
}

namespace {

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<double, 9>;

// Negative mean log-likelihood and gradient in x = (log ν, μ, log σ²).
double objective(std::span<const double> samples, const Vec3& x, Vec3& grad) {
  const double nu = std::exp(x[0]);
  const double mu = x[1];
  const double sigma2 = std::exp(x[2]);
  const double count = static_cast<double>(samples.size());
  double tail = 0.0;
  double d_mu = 0.0;
  double frac = 0.0;  // Σ r²/(νσ² + r²)
  for (double s : samples) {
    const double r = s - mu;
    const double r2 = r * r;
    const double denom = nu * sigma2 + r2;
    tail += std::log1p(r2 / (nu * sigma2));
    d_mu += r / denom;
    frac += r2 / denom;
  }
  const double ll = count * (log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * kPi * sigma2)) -
                    0.5 * (nu + 1.0) * tail;
  const double dll_dnu = count * (0.5 * digamma(0.5 * (nu + 1.0)) - 0.5 * digamma(0.5 * nu) - 0.5 / nu) -
                         0.5 * tail + 0.5 * (nu + 1.0) * frac / nu;
  const double dll_dmu = (nu + 1.0) * d_mu;
  const double dll_dlogs2 = -0.5 * count + 0.5 * (nu + 1.0) * frac;
  grad = {-dll_dnu * nu / count, -dll_dmu / count, -dll_dlogs2 / count};
  return -ll / count;
}

struct LocalFit {
  Vec3 x{};
  double f = std::numeric_limits<double>::infinity();
  bool converged = false;
};

LocalFit projected_bfgs(std::span<const double> samples, Vec3 x, double lo, double hi) {
  constexpr int kMaxIter = 300;
  constexpr double kGradTol = 1e-8;
  const auto project = [&](Vec3& v) { v[0] = std::clamp(v[0], lo, hi); };
  project(x);
  Mat3 h{1, 0, 0, 0, 1, 0, 0, 0, 1};
  Vec3 g;
  double f = objective(samples, x, g);
  LocalFit out;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    if (!std::isfinite(f)) return out;
    // Components pinned at a bound with the gradient pushing outward.
    const bool pinned = (x[0] <= lo && g[0] > 0.0) || (x[0] >= hi && g[0] < 0.0);
    Vec3 pg = g;
    if (pinned) pg[0] = 0.0;
    const double pg_norm = std::max({std::abs(pg[0]), std::abs(pg[1]), std::abs(pg[2])});
    if (pg_norm < kGradTol) {
      out = {x, f, true};
      return out;
    }
    Vec3 d{};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) d[i] -= h[i * 3 + j] * pg[j];
    if (pinned) d[0] = 0.0;
    double slope = d[0] * pg[0] + d[1] * pg[1] + d[2] * pg[2];
    if (!(slope < 0.0)) {
      h = {1, 0, 0, 0, 1, 0, 0, 0, 1};
      d = {-pg[0], -pg[1], -pg[2]};
    }
    double step = 1.0;
    Vec3 xn{};
    Vec3 gn{};
    double fn = f;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      xn = {x[0] + step * d[0], x[1] + step * d[1], x[2] + step * d[2]};
      project(xn);
      fn = objective(samples, xn, gn);
      const double decrease = g[0] * (xn[0] - x[0]) + g[1] * (xn[1] - x[1]) + g[2] * (xn[2] - x[2]);
      if (std::isfinite(fn) && fn <= f + 1e-4 * decrease) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No descent left at machine precision: accept as a stationary point
      // when the projected gradient is already small.
      out = {x, f, pg_norm < 1e-5};
      return out;
    }
    const Vec3 s{xn[0] - x[0], xn[1] - x[1], xn[2] - x[2]};
    const Vec3 y{gn[0] - g[0], gn[1] - g[1], gn[2] - g[2]};
    const double sy = s[0] * y[0] + s[1] * y[1] + s[2] * y[2];
    if (sy > 1e-12) {
      // H ← (I - ρsyᵀ) H (I - ρysᵀ) + ρssᵀ
      const double rho = 1.0 / sy;
      Vec3 hy{};
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) hy[i] += h[i * 3 + j] * y[j];
      const double yhy = y[0] * hy[0] + y[1] * hy[1] + y[2] * hy[2];
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          h[i * 3 + j] += -rho * (hy[i] * s[j] + s[i] * hy[j]) + (rho * rho * yhy + rho) * s[i] * s[j];
    }
    x = xn;
    g = gn;
    f = fn;
  }
  out = {x, f, false};
  return out;
}

}  // namespace

TFit fit_student_t(std::span<const double> samples, const TFitBounds& bounds) {
  if (samples.size() < 10) throw DomainError("fit_student_t: need at least 10 samples");
  if (!(bounds.nu_lo > 0.0) || !(bounds.nu_hi > bounds.nu_lo)) throw DomainError("fit_student_t: invalid bounds");
  std::vector<double> sorted(samples.begin(), samples.end());
  const double med = median_of(sorted);
  std::vector<double> dev(sorted.size());
  for (std::size_t i = 0; i < sorted.size(); ++i) dev[i] = std::abs(sorted[i] - med);
  double scale = 1.4826 * median_of(dev);
  if (!(scale > 0.0)) scale = 1.0;

  const double lo = std::log(bounds.nu_lo);
  const double hi = std::log(bounds.nu_hi);
  LocalFit best;
  for (double nu0 : {1.0, 3.0, 8.0, 20.0, 60.0}) {
    const double start_nu = std::clamp(nu0, bounds.nu_lo, bounds.nu_hi);
    const LocalFit fit = projected_bfgs(samples, {std::log(start_nu), med, 2.0 * std::log(scale)}, lo, hi);
    if (fit.converged && fit.f < best.f) best = fit;
  }
  if (!best.converged) throw FitDiverged("fit_student_t: no start converged");
  TFit out;
  out.nu = std::clamp(std::exp(best.x[0]), bounds.nu_lo, bounds.nu_hi);
  out.mu = best.x[1];
  out.sigma2 = std::exp(best.x[2]);
  out.log_likelihood = student_t_loglik(samples, out.nu, out.mu, out.sigma2);
  out.converged = true;
  return out;
}

void BiasStudyConfig::validate() const {
  if (repetitions < 2) throw DomainError("bias study: repetitions must be at least 2");
  if (sample_sizes.empty()) throw DomainError("bias study: no sample sizes");
  for (std::size_t k = 0; k < sample_sizes.size(); ++k) {
    if (sample_sizes[k] == 0) throw DomainError("bias study: sample sizes must be positive");
    if (k > 0 && sample_sizes[k] <= sample_sizes[k - 1]) throw DomainError("bias study: sample sizes must ascend");
  }
  if (!(gt_nu > 0.0) || !(gt_sigma2 > 0.0)) throw DomainError("bias study: invalid ground truth");
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile: empty input");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

ResidualTable bias_study(const BiasStudyConfig& cfg) {
  cfg.validate();
  const std::size_t sizes = cfg.sample_sizes.size();
  const std::size_t total = sizes * cfg.repetitions;
  std::vector<TFit> fits(total);
  std::vector<char> ok(total, 0);
  const RngStream root(cfg.seed);
  parallel_for(total, cfg.jobs, [&](std::size_t job) {
    const std::size_t size_idx = job / cfg.repetitions;
    RngStream rng = root.split(job);
    const auto samples =
        student_t_samples(cfg.gt_nu, cfg.gt_mu, cfg.gt_sigma2, cfg.sample_sizes[size_idx], rng);
    try {
      fits[job] = fit_student_t(samples, cfg.bounds);
      ok[job] = 1;
    } catch (const FitDiverged&) {
      ok[job] = 0;
    }
  });

  ResidualTable table;
  for (std::size_t s = 0; s < sizes; ++s) {
    std::vector<double> rnu, rmu, rs2, abs_nu;
    ResidualRow row;
    row.sample_size = cfg.sample_sizes[s];
    for (std::size_t r = 0; r < cfg.repetitions; ++r) {
      const std::size_t job = s * cfg.repetitions + r;
      if (!ok[job]) {
        ++row.diverged;
        continue;
      }
      rnu.push_back(fits[job].nu - cfg.gt_nu);
      rmu.push_back(fits[job].mu - cfg.gt_mu);
      rs2.push_back(fits[job].sigma2 - cfg.gt_sigma2);
      abs_nu.push_back(std::abs(rnu.back()));
    }
    row.fits = rnu.size();
    if (!rnu.empty()) {
      const auto triple = [](const std::vector<double>& v) {
        return QuantileTriple{quantile(v, 0.16), quantile(v, 0.5), quantile(v, 0.84)};
      };
      row.nu = triple(rnu);
      row.mu = triple(rmu);
      row.sigma2 = triple(rs2);
      row.median_abs_nu = median_of(abs_nu);
      row.iqr_mu = quantile(rmu, 0.75) - quantile(rmu, 0.25);
    }
    table.rows.push_back(row);
  }
  return table;
}

// ------------------------------------------------------------------- ensemble

GridPrediction evaluate_point(const ModelState& model, double t) {
  const double input[1] = {t};
  const UncertaintyReport rep = predict(model, input);
  GridPrediction p;
  p.t = t;
  p.x = rep.prediction[0];
  p.y = rep.prediction[1];
  p.nu = rep.nu;
  p.cov_xx = rep.aleatoric(0, 0);
  p.cov_xy = rep.aleatoric(1, 0);
  p.cov_yy = rep.aleatoric(1, 1);
  p.corr = std::clamp(p.cov_xy / std::sqrt(p.cov_xx * p.cov_yy), -1.0, 1.0);
  return p;
}

EnsembleResult circle_ensemble(const Dataset& data, const EnsembleConfig& cfg) {
  if (data.n != 2) throw DimensionMismatch("circle_ensemble: dataset must be two-dimensional");
  if (cfg.network.head.n != 2) throw DimensionMismatch("circle_ensemble: head must be two-dimensional");
  if (cfg.models == 0) throw DomainError("circle_ensemble: need at least one model");
  EnsembleResult result;
  result.grid = cfg.eval_grid;
  result.models.resize(cfg.models);
  const RngStream root(cfg.seed);
  parallel_for(cfg.models, cfg.jobs, [&](std::size_t i) {
    RngStream stream = root.split(i);
    ModelCurve& curve = result.models[i];
    curve.index = i;
    curve.seed = stream.next_u64();
    TrainConfig train_cfg = cfg.train;
    train_cfg.seed = stream.next_u64();
    try {
      TrainResult trained = train(init(cfg.network, curve.seed), data, train_cfg);
      curve.final_loss = trained.history.back();
      curve.model = std::move(trained.model);
      curve.converged = true;
      for (double t : cfg.eval_grid) curve.points.push_back(evaluate_point(curve.model, t));
    } catch (const NonFiniteLoss&) {
      curve.converged = false;
    }
  });
  for (const auto& m : result.models)
    if (!m.converged) ++result.failed;
  return result;
}

namespace {

template <typename Field>
std::vector<CurveRow> curve_of(const EnsembleResult& result, Field field) {
  std::vector<CurveRow> rows;
  for (std::size_t g = 0; g < result.grid.size(); ++g) {
    CurveRow row;
    row.t = result.grid[g];
    for (const auto& m : result.models)
      if (m.converged) row.per_model.push_back(field(m.points[g]));
    row.median = row.per_model.empty() ? std::numeric_limits<double>::quiet_NaN() : median_of(row.per_model);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::vector<CurveRow> correlation_curve(const EnsembleResult& result) {
  return curve_of(result, [](const GridPrediction& p) { return p.corr; });
}

std::vector<CurveRow> nu_curve(const EnsembleResult& result) {
  return curve_of(result, [](const GridPrediction& p) { return p.nu; });
}

Interval bootstrap_median_ci(std::span<const double> values, std::size_t resamples, double level, RngStream& rng) {
  if (values.empty() || resamples == 0) throw DomainError("bootstrap_median_ci: empty input");
  std::vector<double> medians(resamples);
  std::vector<double> draw(values.size());
  for (double& m : medians) {
    for (double& d : draw) d = values[static_cast<std::size_t>(rng.next_u64() % values.size())];
    m = median_of(draw);
  }
  const double tail = 0.5 * (1.0 - level);
  return Interval{quantile(medians, tail), quantile(medians, 1.0 - tail)};
}

// ------------------------------------------------------------------------ io

void write_degeneration_csv(const std::vector<DegenerationRow>& rows, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "kappa,beta,nll,total_paper_phi,total_virtual_phi\n";
  for (const auto& r : rows)
    out << fmt(r.kappa) << ',' << fmt(r.beta) << ',' << fmt(r.nll) << ',' << fmt(r.total_paper) << ','
        << fmt(r.total_virtual) << '\n';
}

void write_residual_csv(const ResidualTable& table, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "sample_size,fits,diverged,nu_q16,nu_median,nu_q84,mu_q16,mu_median,mu_q84,sigma2_q16,sigma2_median,"
         "sigma2_q84,median_abs_nu\n";
  for (const auto& r : table.rows) {
    out << r.sample_size << ',' << r.fits << ',' << r.diverged;
    for (const auto* q : {&r.nu, &r.mu, &r.sigma2}) out << ',' << fmt(q->q16) << ',' << fmt(q->median) << ',' << fmt(q->q84);
    out << ',' << fmt(r.median_abs_nu) << '\n';
  }
}

void write_ensemble_csv(const EnsembleResult& result, const std::filesystem::path& path) {
  auto out = open_csv(path);
  out << "model,seed,converged,t,x,y,nu,cov_xx,cov_xy,cov_yy,corr\n";
  for (const auto& m : result.models) {
    for (const auto& p : m.points) {
      out << m.index << ',' << m.seed << ',' << (m.converged ? 1 : 0) << ',' << fmt(p.t) << ',' << fmt(p.x) << ','
          << fmt(p.y) << ',' << fmt(p.nu) << ',' << fmt(p.cov_xx) << ',' << fmt(p.cov_xy) << ',' << fmt(p.cov_yy)
          << ',' << fmt(p.corr) << '\n';
    }
  }
}

void write_curve_csv(const std::vector<CurveRow>& rows, const std::filesystem::path& path, const char* value_name) {
  auto out = open_csv(path);
  const std::size_t models = rows.empty() ? 0 : rows.front().per_model.size();
  out << 't';
  for (std::size_t m = 0; m < models; ++m) out << ',' << value_name << '_' << m;
  out << ",median\n";
  for (const auto& r : rows) {
    out << fmt(r.t);
    for (double v : r.per_model) out << ',' << fmt(v);
    out << ',' << fmt(r.median) << '\n';
  }
}

void write_json(const nlohmann::json& json, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << json.dump(2) << '\n';
}

}  // namespace evreg
