#include "evreg/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>

#include "evreg/distributions.hpp"
#include "evreg/errors.hpp"
#include "evreg/experiments.hpp"
#include "evreg/losses.hpp"
#include "evreg/net.hpp"

namespace evreg {

namespace {

std::string printf_string(const char* fmt, double a, double b) {
  char buf[160];
  std::snprintf(buf, sizeof buf, fmt, a, b);
  return buf;
}

EvidentialParams random_niw(std::size_t n, RngStream& rng) {
  EvidentialParams m;
  m.mu0.resize(n);
  for (double& v : m.mu0) v = rng.normal();
  Vector rows(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    rows[i * n + i] = 0.6 + rng.uniform();
    for (std::size_t j = 0; j < i; ++j) rows[i * n + j] = 0.4 * rng.normal();
  }
  m.psi_chol = CholeskyFactor::from_lower(n, rows);
  m.kappa = 0.5 + 2.0 * rng.uniform();
  m.nu = static_cast<double>(n) + 2.0 + 6.0 * rng.uniform();
  return m;
}

// Largest |analytic - numeric| / max(1, |analytic|, |numeric|) over the
// coordinates, with numeric from central differences.
double gradient_error(const std::function<double(const Vector&)>& f, const Vector& x, const Vector& analytic) {
  double worst = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double h = 1e-5 * std::max(1.0, std::abs(x[i]));
    Vector up = x;
    Vector dn = x;
    up[i] += h;
    dn[i] -= h;
    const double numeric = (f(up) - f(dn)) / (2.0 * h);
    const double scale = std::max({1.0, std::abs(analytic[i]), std::abs(numeric)});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / scale);
  }
  return worst;
}

CheckResult check_evidence_mc(const VerifyOptions& opts, double fault) {
  RngStream root(opts.seed);
  double worst = 0.0;
  for (std::size_t c = 0; c < opts.mc_cases; ++c) {
    RngStream rng = root.split(c);
    const std::size_t n = 1 + c % 3;
    const EvidentialParams m = random_niw(n, rng);
    const Moments mom = niw_moments(m);
    Vector y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = mom.mean[i] + std::sqrt(mom.aleatoric(i, i)) * rng.normal();
    const double closed = std::exp(model_evidence_logpdf(y, m) + fault);
    const McEstimate mc = model_evidence_mc(y, m, opts.mc_samples, rng);
    worst = std::max(worst, std::abs(closed - mc.estimate) / mc.std_error);
  }
  return {"evidence_closed_form_vs_monte_carlo", worst <= 3.0,
          printf_string("max |closed - mc| = %.3g standard errors (limit %.0f)", worst, 3.0)};
}

CheckResult check_conjugacy(const VerifyOptions& opts, double fault) {
  RngStream rng = RngStream(opts.seed).split(1000);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 3; ++n) {
    const EvidentialParams prior = random_niw(n, rng);
    std::vector<Vector> data(7, Vector(n));
    for (auto& y : data)
      for (double& v : y) v = 2.0 * rng.normal();
    const EvidentialParams batch = posterior_update(prior, data);
    EvidentialParams seq = prior;
    for (const auto& y : data) seq = posterior_update(seq, std::span<const Vector>(&y, 1));
    worst = std::max({worst, std::abs(batch.kappa - seq.kappa), std::abs(batch.nu - seq.nu)});
    for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(batch.mu0[i] - seq.mu0[i]));
    const SymMatrix a = batch.psi();
    const SymMatrix b = seq.psi();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j <= i; ++j)
        worst = std::max(worst, std::abs(a(i, j) - b(i, j) + fault) / std::max(1.0, std::abs(a(i, j))));
  }
  return {"posterior_batch_equals_sequential", worst <= 1e-10,
          printf_string("max deviation %.3g (limit %.0e)", worst, 1e-10)};
}

CheckResult check_sylvester(const VerifyOptions& opts, double fault) {
  RngStream rng = RngStream(opts.seed).split(2000);
  double worst = 0.0;
  for (std::size_t n = 1; n <= 4; ++n) {
    const EvidentialParams m = random_niw(n, rng);
    Vector v(n);
    for (double& x : v) x = rng.normal();
    const double c = 0.1 + rng.uniform();
    const SymMatrix updated = m.psi().plus(SymMatrix::outer(v, c));
    const double direct = logdet(cholesky(updated));
    worst = std::max(worst, std::abs(sylvester_logdet_rank1(m.psi_chol, c, v) + fault - direct));
  }
  return {"rank_one_logdet", worst <= 1e-10, printf_string("max |identity - direct| %.3g (limit %.0e)", worst, 1e-10)};
}

CheckResult check_gradients(const VerifyOptions& opts, double fault) {
  RngStream rng = RngStream(opts.seed).split(3000);
  double worst = 0.0;
  for (std::size_t k = 0; k < opts.gradient_points; ++k) {
    // NIG
    {
      const double y = rng.normal() * 2.0;
      const Vector x{rng.normal(), 0.2 + 3.0 * rng.uniform(), 1.1 + 3.0 * rng.uniform(), 0.2 + 2.0 * rng.uniform()};
      const auto f = [y](const Vector& p) { return nig_nll(y, NigParams{p[0], p[1], p[2], p[3]}).value; };
      Vector g = nig_nll(y, NigParams{x[0], x[1], x[2], x[3]}).gradient;
      g[0] += fault;
      worst = std::max(worst, gradient_error(f, x, g));
    }
    // coupled NIW, n = 2
    {
      const Vector y{rng.normal(), rng.normal()};
      const double r = 0.5 + rng.uniform();
      Vector x{0.5 * rng.normal(), 0.5 * rng.normal(), 0.3 * rng.normal(), 0.5 * rng.normal(), 0.3 * rng.normal(),
               3.5 + 8.0 * rng.uniform()};
      const auto unpack = [&](const Vector& p) {
        return CoupledHeadParams{{p[0], p[1]}, {p[2], p[3], p[4]}, p[5], r};
      };
      const auto f = [&](const Vector& p) { return coupled_niw_nll(y, unpack(p)).value; };
      Vector g = coupled_niw_nll(y, unpack(x)).gradient;
      g[5] += fault;
      worst = std::max(worst, gradient_error(f, x, g));
    }
  }
  // Network backpropagation on a small batch.
  {
    NetworkConfig cfg;
    cfg.hidden = {6, 5};
    ModelState model = init(cfg, opts.seed);
    std::vector<Record> batch;
    for (int i = 0; i < 4; ++i) {
      const double t = 6.0 * rng.uniform();
      batch.push_back(Record{t, {std::cos(t) + 0.1 * rng.normal(), std::sin(t) + 0.1 * rng.normal()}});
    }
    const Vector x = model.flat();
    const auto f = [&](const Vector& p) {
      ModelState m = model;
      m.set_flat(p);
      return loss_and_grad(m, batch).loss;
    };
    Vector g = loss_and_grad(model, batch).gradient;
    g.back() += fault;
    worst = std::max(worst, gradient_error(f, x, g));
  }
  return {"loss_gradients_vs_finite_differences", worst <= 1e-5,
          printf_string("max relative error %.3g (limit %.0e)", worst, 1e-5)};
}

CheckResult check_degeneration(double fault) {
  const auto grid = log_grid(1e-3, 1e3, 61);
  const auto rows = degeneration_scan(2.0, 0.7, 2.0, grid);
  double lo = rows.front().nll;
  double hi = lo;
  bool decreasing = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double nll = rows[i].nll + fault * static_cast<double>(i);
    lo = std::min(lo, nll);
    hi = std::max(hi, nll);
    if (i > 0 && !(rows[i - 1].total_paper < rows[i].total_paper)) decreasing = false;
  }
  const bool ok = hi - lo <= 1e-12 && decreasing;
  return {"degeneration_invariance", ok,
          printf_string("nll spread %.3g, regularized loss decreasing toward small kappa: %.0f", hi - lo,
                        decreasing ? 1.0 : 0.0)};
}

CheckResult check_univariate_reduction(const VerifyOptions& opts, double fault) {
  RngStream rng = RngStream(opts.seed).split(4000);
  double worst = 0.0;
  for (int k = 0; k < 200; ++k) {
    const NigParams p{rng.normal(), 0.1 + 5.0 * rng.uniform(), 0.6 + 5.0 * rng.uniform(), 0.1 + 3.0 * rng.uniform()};
    const double y = 3.0 * rng.normal();
    const double uni = nig_nll(y, p).value;
    const double y1[1] = {y};
    const double multi = niw_nll(y1, to_evidential(p)).value + fault;
    worst = std::max(worst, std::abs(uni - multi));
  }
  return {"univariate_reduction", worst <= 1e-12, printf_string("max |nig - niw| %.3g (limit %.0e)", worst, 1e-12)};
}

}  // namespace

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  if (opts.mc_samples < 100) throw DomainError("verify: mc_samples must be at least 100");
  const double fault = opts.inject_fault ? 1e-3 : 0.0;
  std::vector<CheckResult> out;
  out.push_back(check_evidence_mc(opts, opts.inject_fault ? 0.5 : 0.0));
  out.push_back(check_conjugacy(opts, fault));
  out.push_back(check_sylvester(opts, fault));
  out.push_back(check_univariate_reduction(opts, fault));
  out.push_back(check_gradients(opts, fault));
  out.push_back(check_degeneration(fault));
  return out;
}

}  // namespace evreg
