#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "evreg/datagen.hpp"
#include "evreg/errors.hpp"
#include "evreg/experiments.hpp"
#include "evreg/special.hpp"

using namespace evreg;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("grids") {
  const auto g = log_grid(1e-3, 1e3, 7);
  REQUIRE(g.size() == 7);
  CHECK(g.front() == doctest::Approx(1e-3));
  CHECK(g[3] == doctest::Approx(1.0));
  CHECK(g.back() == doctest::Approx(1e3));
  const auto u = uniform_grid(0.0, 2.0, 5);
  CHECK(u == std::vector<double>{0.0, 0.5, 1.0, 1.5, 2.0});
  CHECK_THROWS_AS(log_grid(0.0, 1.0, 3), DomainError);
}

TEST_CASE("degeneration scan") {
  const auto grid = log_grid(1e-3, 1e3, 121);
  const auto rows = degeneration_scan(2.0, 1.0, 2.0, grid);
  double lo = rows[0].nll, hi = rows[0].nll;
  for (const auto& r : rows) {
    lo = std::min(lo, r.nll);
    hi = std::max(hi, r.nll);
    CHECK(r.beta * (1.0 + r.kappa) / r.kappa == doctest::Approx(2.0).epsilon(1e-14));
  }
  CHECK(hi - lo <= 1e-12);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i - 1].total_paper < rows[i].total_paper);
    CHECK(rows[i - 1].total_virtual < rows[i].total_virtual);
  }
  const std::vector<double> bad{1.0, -1.0};
  CHECK_THROWS_AS(degeneration_scan(2.0, 1.0, 2.0, bad), DomainError);
  CHECK_THROWS_AS(degeneration_scan(2.0, 1.0, 0.0, grid), DomainError);
}

TEST_CASE("quantile interpolates between order statistics") {
  const std::vector<double> v{4.0, 1.0, 3.0, 2.0};
  CHECK(quantile(v, 0.0) == 1.0);
  CHECK(quantile(v, 1.0) == 4.0);
  CHECK(quantile(v, 0.5) == 2.5);
  CHECK(quantile(v, 0.25) == doctest::Approx(1.75));
  CHECK_THROWS_AS(quantile({}, 0.5), DomainError);
}

TEST_CASE("Student-t fit") {
  RngStream rng(71);
  std::vector<double> gauss(10000);
  for (double& v : gauss) v = rng.normal();
  const TFit fg = fit_student_t(gauss);
  CHECK(fg.nu >= 10.0);
  CHECK(std::abs(fg.sigma2 * fg.nu / (fg.nu - 2.0) - 1.0) <= 0.05);

  const std::vector<double> s = student_t_samples(3.0, 0.0, 1.0, 100000, rng);
  const TFit f = fit_student_t(s);
  CHECK(f.converged);
  CHECK(std::abs(f.nu - 3.0) <= 0.3);
  CHECK(std::abs(f.mu) <= 0.1);
  CHECK(std::abs(f.sigma2 - 1.0) <= 0.1);
  CHECK(f.log_likelihood >= student_t_loglik(s, 3.0, 0.0, 1.0));

  for (int k = 0; k < 10; ++k) {
    const std::vector<double> small = student_t_samples(3.0, 0.0, 1.0, 30, rng);
    const TFit g = fit_student_t(small);
    CHECK(g.nu >= 0.5);
    CHECK(g.nu <= 100.0);
    CHECK(g.log_likelihood >= student_t_loglik(small, 3.0, 0.0, 1.0));
  }
  CHECK_THROWS_AS(fit_student_t(std::vector<double>(5, 1.0)), DomainError);
}

TEST_CASE("bias study is deterministic and ordered") {
  BiasStudyConfig cfg;
  cfg.sample_sizes = {20, 200};
  cfg.repetitions = 40;
  cfg.seed = 3;
  cfg.jobs = 1;
  const ResidualTable a = bias_study(cfg);
  cfg.jobs = 3;
  const ResidualTable b = bias_study(cfg);
  REQUIRE(a.rows.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(a.rows[i].nu.median == b.rows[i].nu.median);
    CHECK(a.rows[i].sigma2.q84 == b.rows[i].sigma2.q84);
    CHECK(a.rows[i].fits + a.rows[i].diverged == 40);
    for (const QuantileTriple* q : {&a.rows[i].nu, &a.rows[i].mu, &a.rows[i].sigma2}) {
      CHECK(q->q16 <= q->median);
      CHECK(q->median <= q->q84);
    }
    CHECK(std::abs(a.rows[i].mu.median) <= 3.0 * a.rows[i].iqr_mu / std::sqrt(40.0));
  }

  BiasStudyConfig bad = cfg;
  bad.sample_sizes = {50, 20};
  CHECK_THROWS_AS(bias_study(bad), DomainError);
  bad.sample_sizes = {20};
  bad.repetitions = 1;
  CHECK_THROWS_AS(bias_study(bad), DomainError);

  const fs::path dir = fs::temp_directory_path() / "evreg_test_bias";
  write_residual_csv(a, dir / "a.csv");
  write_residual_csv(b, dir / "b.csv");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  fs::remove_all(dir);
}

TEST_CASE("ensemble bookkeeping") {
  CircleConfig cc;
  cc.count = 60;
  cc.seed = 2;
  const Dataset data = circle_dataset(cc);
  EnsembleConfig cfg;
  cfg.models = 3;
  cfg.network.hidden = {8, 8};
  cfg.train.epochs = 40;
  cfg.train.learning_rate = 5e-3;
  cfg.eval_grid = uniform_grid(0.0, 2.0 * kPi, 25);
  cfg.seed = 9;
  cfg.jobs = 1;
  const EnsembleResult a = circle_ensemble(data, cfg);
  cfg.jobs = 2;
  const EnsembleResult b = circle_ensemble(data, cfg);
  REQUIRE(a.models.size() == 3);
  CHECK(a.failed == 0);
  CHECK(a.models[0].seed != a.models[1].seed);
  for (std::size_t m = 0; m < 3; ++m) {
    CHECK(a.models[m].model.flat() == b.models[m].model.flat());
    for (const auto& p : a.models[m].points) {
      CHECK(p.nu > 3.0);
      CHECK(p.nu < 13.0);
      CHECK(p.corr >= -1.0);
      CHECK(p.corr <= 1.0);
    }
  }
  const auto corr = correlation_curve(a);
  const auto nu = nu_curve(a);
  REQUIRE(corr.size() == 25);
  CHECK(corr[3].per_model.size() == 3);
  CHECK(nu[7].median == quantile(nu[7].per_model, 0.5));

  const fs::path dir = fs::temp_directory_path() / "evreg_test_ensemble";
  write_ensemble_csv(a, dir / "a.csv");
  write_ensemble_csv(b, dir / "b.csv");
  CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
  write_curve_csv(nu, dir / "nu.csv", "nu");
  CHECK(slurp(dir / "nu.csv").rfind("t,nu_0,nu_1,nu_2,median\n", 0) == 0);
  fs::remove_all(dir);

  Dataset wrong = data;
  wrong.n = 3;
  CHECK_THROWS_AS(circle_ensemble(wrong, cfg), DimensionMismatch);
}

TEST_CASE("correlation of a nearly rank-one head tends to one") {
  NetworkConfig cfg;
  cfg.hidden = {};
  ModelState model = init(cfg, 0);
  for (double& w : model.layers[0].weights) w = 0.0;
  double prev = 0.0;
  for (double eps : {1.0, 0.1, 1e-2, 1e-4}) {
    // L = [[1, 0], [1, ε]]
    model.layers[0].bias = {0.0, 0.0, 0.0, 1.0, std::log(eps), 0.0};
    const GridPrediction p = evaluate_point(model, 0.3);
    CHECK(p.corr > prev);
    CHECK(p.corr == doctest::Approx(1.0 / std::sqrt(1.0 + eps * eps)).epsilon(1e-12));
    prev = p.corr;
  }
  CHECK(prev > 0.9999);
}

TEST_CASE("bootstrap interval of the median") {
  RngStream data_rng(72);
  std::vector<double> v(200);
  for (double& x : v) x = 5.0 + data_rng.normal();
  RngStream a(1), b(1);
  const Interval i1 = bootstrap_median_ci(v, 1000, 0.95, a);
  const Interval i2 = bootstrap_median_ci(v, 1000, 0.95, b);
  CHECK(i1.lo == i2.lo);
  CHECK(i1.hi == i2.hi);
  const double med = quantile(v, 0.5);
  CHECK(i1.lo <= med);
  CHECK(med <= i1.hi);
  CHECK(i1.hi - i1.lo < 0.6);
}

TEST_CASE("a ten times smaller circle sample lowers the median nu") {
  const auto median_nu = [](std::size_t count) {
    CircleConfig cc;
    cc.count = count;
    cc.seed = 21;
    EnsembleConfig cfg;
    cfg.models = 8;
    cfg.train.epochs = 2000;
    cfg.eval_grid = uniform_grid(0.0, 2.0 * kPi, 50);
    cfg.seed = 22;
    const EnsembleResult r = circle_ensemble(circle_dataset(cc), cfg);
    std::vector<double> all;
    for (const auto& m : r.models)
      for (const auto& p : m.points) all.push_back(p.nu);
    return quantile(all, 0.5);
  };
  CHECK(median_nu(30) < median_nu(300));
}
