// evreg: data generation, training, prediction, self-verification and the
// three reproduction studies.
//
// Exit codes: 0 success, 1 runtime failure, 2 usage error.

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evreg/datagen.hpp"
#include "evreg/errors.hpp"
#include "evreg/experiments.hpp"
#include "evreg/net.hpp"
#include "evreg/special.hpp"
#include "evreg/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;
constexpr int kProvenanceVersion = 1;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path default_output_dir() {
  if (const char* env = std::getenv("EVREG_OUTPUT_DIR"); env && *env) return env;
  return "evreg-out";
}

std::size_t default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

class RunLog {
 public:
  RunLog(std::string command, json config)
      : command_(std::move(command)), config_(std::move(config)), start_(std::chrono::steady_clock::now()) {}

  json& config() { return config_; }
  json& results() { return results_; }

  void write(const fs::path& path) const {
    json j{{"format_version", kProvenanceVersion},
           {"command", command_},
           {"software_version", EVREG_VERSION},
           {"config", config_}};
    if (!results_.is_null()) j["results"] = results_;
    j["run"] = {{"timestamp_utc", utc_timestamp()},
                {"wall_time_seconds",
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count()}};
    evreg::write_json(j, path);
  }

 private:
  std::string command_;
  json config_;
  json results_;
  std::chrono::steady_clock::time_point start_;
};

std::uint64_t derived_seed(std::uint64_t seed, std::uint64_t purpose) {
  return evreg::RngStream(seed).split(purpose).next_u64();
}

evreg::HeadConfig checked_head(double r, double nu_lo, double nu_hi) {
  evreg::HeadConfig head;
  head.r = r;
  head.nu_lo = nu_lo;
  head.nu_hi = nu_hi;
  if (!(r > 0.0)) throw UsageError("--r: must be positive");
  if (!(nu_lo >= static_cast<double>(head.n) + 1.0)) throw UsageError("--nu-lo: must be at least n + 1 = 3");
  if (!(nu_hi > nu_lo)) throw UsageError("--nu-hi: must exceed --nu-lo");
  return head;
}

json head_json(const evreg::HeadConfig& h) {
  return {{"n", h.n}, {"r", h.r}, {"nu_lo", h.nu_lo}, {"nu_hi", h.nu_hi}};
}

json train_json(const evreg::TrainConfig& t) {
  return {{"epochs", t.epochs},
          {"batch_size", t.batch_size},
          {"learning_rate", t.learning_rate},
          {"adam_beta1", t.adam_beta1},
          {"adam_beta2", t.adam_beta2},
          {"adam_eps", t.adam_eps},
          {"optimizer", "adam"}};
}

evreg::Dataset load_data(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("--data: file not found: " + path.string());
  return evreg::read_dataset(path);
}

// ---------------------------------------------------------------- generate

struct GenerateArgs {
  std::size_t count = 300;
  double noise = 0.1;
  std::uint64_t seed = 0;
  fs::path out;
};

int cmd_generate(const GenerateArgs& a) {
  evreg::CircleConfig cfg{a.count, a.noise, a.seed};
  const fs::path out = a.out.empty() ? default_output_dir() / "circle.csv" : a.out;
  RunLog log("generate", {{"count", a.count}, {"noise", a.noise}, {"seed", a.seed}, {"out", out.string()}});
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  const evreg::Dataset data = evreg::circle_dataset(cfg);
  evreg::write_dataset(data, out);
  fs::path run = out;
  run.replace_extension(".run.json");
  log.write(run);
  std::cout << "wrote " << data.records.size() << " records to " << out.string() << '\n';
  return 0;
}

// ------------------------------------------------------------------- train

struct TrainArgs {
  fs::path data;
  fs::path out;
  std::size_t epochs = 2000;
  std::size_t batch_size = 0;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  double r = 1.0;
  double nu_lo = 3.0;
  double nu_hi = 13.0;
  std::vector<std::size_t> hidden{32, 32};
};

int cmd_train(const TrainArgs& a) {
  const evreg::HeadConfig head = checked_head(a.r, a.nu_lo, a.nu_hi);
  const evreg::Dataset data = load_data(a.data);
  if (data.n != head.n) throw UsageError("--data: expected two target columns");
  evreg::NetworkConfig net;
  net.hidden = a.hidden;
  net.head = head;
  evreg::TrainConfig tc;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch_size;
  tc.learning_rate = a.lr;
  tc.seed = derived_seed(a.seed, 1);
  const std::uint64_t init_seed = derived_seed(a.seed, 0);

  const fs::path out = a.out.empty() ? default_output_dir() / "train" : a.out;
  fs::create_directories(out);
  RunLog log("train", {{"data", a.data.string()},
                       {"seed", a.seed},
                       {"init_seed", init_seed},
                       {"train_seed", tc.seed},
                       {"hidden", a.hidden},
                       {"head", head_json(head)},
                       {"train", train_json(tc)}});

  const evreg::TrainResult result = evreg::train(evreg::init(net, init_seed), data, tc);
  evreg::save_model(result.model, out / "model.json");
  {
    std::ofstream h(out / "history.csv");
    if (!h) throw evreg::Error("cannot write " + (out / "history.csv").string());
    h << "epoch,loss\n";
    for (std::size_t e = 0; e < result.history.size(); ++e) h << e << ',' << fmt(result.history[e]) << '\n';
  }
  log.results() = {{"final_loss", result.history.back()}, {"parameters", result.model.parameter_count()}};
  log.write(out / "provenance.json");
  std::cout << "final loss " << fmt(result.history.back()) << " after " << result.history.size() << " epochs\n";
  return 0;
}

// ----------------------------------------------------------------- predict

struct PredictArgs {
  fs::path model;
  fs::path out;
  std::vector<double> t;
  std::size_t grid_points = 200;
};

int cmd_predict(const PredictArgs& a) {
  if (!fs::exists(a.model)) throw UsageError("--model: file not found: " + a.model.string());
  const evreg::ModelState model = evreg::load_model(a.model);
  if (model.config.input_dim != 1) throw evreg::Error("predict: only scalar-input models are supported");
  const std::vector<double> ts =
      a.t.empty() ? evreg::uniform_grid(0.0, 2.0 * evreg::kPi, a.grid_points) : a.t;
  const fs::path out = a.out.empty() ? default_output_dir() / "predictions.csv" : a.out;
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  RunLog log("predict", {{"model", a.model.string()}, {"points", ts.size()}, {"out", out.string()}});

  const std::size_t n = model.config.head.n;
  std::ofstream csv(out);
  if (!csv) throw evreg::Error("cannot write " + out.string());
  csv << 't';
  for (std::size_t i = 1; i <= n; ++i) csv << ",mu" << i;
  csv << ",nu";
  for (const char* kind : {"aleatoric", "epistemic"})
    for (std::size_t i = 1; i <= n; ++i)
      for (std::size_t j = 1; j <= i; ++j) csv << ',' << kind << '_' << i << j;
  csv << '\n';
  for (double t : ts) {
    const double input[1] = {t};
    const evreg::UncertaintyReport rep = evreg::predict(model, input);
    csv << fmt(t);
    for (double m : rep.prediction) csv << ',' << fmt(m);
    csv << ',' << fmt(rep.nu);
    for (const evreg::SymMatrix* m : {&rep.aleatoric, &rep.epistemic})
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j <= i; ++j) csv << ',' << fmt((*m)(i, j));
    csv << '\n';
  }
  fs::path run = out;
  run.replace_extension(".run.json");
  log.write(run);
  std::cout << "wrote " << ts.size() << " predictions to " << out.string() << '\n';
  return 0;
}

// ------------------------------------------------------------------ verify

struct VerifyArgs {
  evreg::VerifyOptions opts;
  fs::path out;
};

int cmd_verify(const VerifyArgs& a) {
  const fs::path out = a.out.empty() ? default_output_dir() / "verify" : a.out;
  RunLog log("verify", {{"mc_samples", a.opts.mc_samples},
                        {"mc_cases", a.opts.mc_cases},
                        {"gradient_points", a.opts.gradient_points},
                        {"seed", a.opts.seed}});
  if (a.opts.inject_fault) log.config()["inject_fault"] = true;
  const auto checks = evreg::run_verification(a.opts);
  json report = json::array();
  std::vector<std::string> failed;
  for (const auto& c : checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
    report.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    if (!c.passed) failed.push_back(c.name);
  }
  log.results() = report;
  log.write(out / "provenance.json");
  if (!failed.empty()) {
    std::cerr << "verify: failed checks:";
    for (const auto& f : failed) std::cerr << ' ' << f;
    std::cerr << '\n';
    return kExitRuntime;
  }
  return 0;
}

// ------------------------------------------------------------ degeneration

struct DegenerationArgs {
  double alpha = 2.0;
  double product = 2.0;
  double y_minus_mu0 = 1.0;
  double lambda = 1.0;
  double kappa_min = 1e-3;
  double kappa_max = 1e3;
  std::size_t points = 61;
  fs::path out;
};

int cmd_degeneration(const DegenerationArgs& a) {
  if (!(a.kappa_max > a.kappa_min)) throw UsageError("--kappa-max: must exceed --kappa-min");
  const fs::path out = a.out.empty() ? default_output_dir() / "degeneration" : a.out;
  RunLog log("degeneration", {{"alpha", a.alpha},
                              {"product", a.product},
                              {"y_minus_mu0", a.y_minus_mu0},
                              {"lambda", a.lambda},
                              {"kappa_min", a.kappa_min},
                              {"kappa_max", a.kappa_max},
                              {"points", a.points}});
  const auto grid = evreg::log_grid(a.kappa_min, a.kappa_max, a.points);
  const auto rows = evreg::degeneration_scan(a.alpha, a.y_minus_mu0, a.product, grid, a.lambda);
  evreg::write_degeneration_csv(rows, out / "degeneration.csv");
  double lo = rows.front().nll;
  double hi = lo;
  for (const auto& r : rows) {
    lo = std::min(lo, r.nll);
    hi = std::max(hi, r.nll);
  }
  log.results() = {{"nll_spread", hi - lo}};
  log.write(out / "provenance.json");
  std::cout << "nll spread over " << rows.size() << " points: " << fmt(hi - lo) << '\n';
  return 0;
}

// -------------------------------------------------------------- bias-study

struct BiasArgs {
  evreg::BiasStudyConfig cfg;
  double failure_budget = 0.05;
  fs::path out;
};

int cmd_bias_study(BiasArgs a) {
  try {
    a.cfg.validate();
  } catch (const evreg::DomainError& e) {
    throw UsageError(std::string("--sizes/--reps: ") + e.what());
  }
  if (!(a.cfg.bounds.nu_hi > a.cfg.bounds.nu_lo)) throw UsageError("--nu-max: must exceed --nu-min");
  const fs::path out = a.out.empty() ? default_output_dir() / "bias-study" : a.out;
  RunLog log("bias-study", {{"gt_nu", a.cfg.gt_nu},
                            {"gt_mu", a.cfg.gt_mu},
                            {"gt_sigma2", a.cfg.gt_sigma2},
                            {"sample_sizes", a.cfg.sample_sizes},
                            {"repetitions", a.cfg.repetitions},
                            {"nu_bounds", {a.cfg.bounds.nu_lo, a.cfg.bounds.nu_hi}},
                            {"seed", a.cfg.seed},
                            {"failure_budget", a.failure_budget},
                            {"fit", "multistart projected BFGS on (log nu, mu, log sigma2), sample MLE"}});
  const evreg::ResidualTable table = evreg::bias_study(a.cfg);
  evreg::write_residual_csv(table, out / "residuals.csv");
  std::size_t diverged = 0;
  json rows = json::array();
  for (const auto& r : table.rows) {
    diverged += r.diverged;
    rows.push_back({{"sample_size", r.sample_size},
                    {"median_abs_nu_residual", r.median_abs_nu},
                    {"fits", r.fits},
                    {"diverged", r.diverged}});
  }
  log.results() = {{"rows", rows}, {"diverged", diverged}};
  log.write(out / "provenance.json");
  const double total = static_cast<double>(a.cfg.repetitions * a.cfg.sample_sizes.size());
  std::cout << "bias study: " << table.rows.size() << " sample sizes, " << diverged << " diverged fits\n";
  if (static_cast<double>(diverged) > a.failure_budget * total) {
    std::cerr << "bias-study: " << diverged << " diverged fits exceed the failure budget\n";
    return kExitRuntime;
  }
  return 0;
}

// ---------------------------------------------------------------- ensemble

struct EnsembleArgs {
  fs::path data;
  std::size_t models = 20;
  std::size_t epochs = evreg::EnsembleConfig{}.train.epochs;
  std::size_t batch_size = 0;
  double lr = 1e-3;
  std::uint64_t seed = 0;
  std::size_t jobs = default_jobs();
  std::size_t grid_points = 200;
  double r = 1.0;
  double nu_lo = 3.0;
  double nu_hi = 13.0;
  std::vector<std::size_t> hidden{32, 32};
  double failure_budget = 0.5;
  std::size_t bootstrap = 2000;
  fs::path out;
};

int cmd_ensemble(const EnsembleArgs& a) {
  const evreg::HeadConfig head = checked_head(a.r, a.nu_lo, a.nu_hi);
  const evreg::Dataset data = load_data(a.data);
  if (data.n != 2) throw UsageError("--data: expected two target columns");
  evreg::EnsembleConfig cfg;
  cfg.models = a.models;
  cfg.network.hidden = a.hidden;
  cfg.network.head = head;
  cfg.train.epochs = a.epochs;
  cfg.train.batch_size = a.batch_size;
  cfg.train.learning_rate = a.lr;
  cfg.eval_grid = evreg::uniform_grid(0.0, 2.0 * evreg::kPi, a.grid_points);
  cfg.seed = a.seed;
  cfg.jobs = a.jobs;

  const fs::path out = a.out.empty() ? default_output_dir() / "ensemble" : a.out;
  RunLog log("ensemble", {{"data", a.data.string()},
                          {"data_provenance",
                           {{"generator", data.provenance.generator},
                            {"params", data.provenance.params},
                            {"seed", data.provenance.seed}}},
                          {"models", a.models},
                          {"seed", a.seed},
                          {"grid_points", a.grid_points},
                          {"hidden", a.hidden},
                          {"head", head_json(head)},
                          {"train", train_json(cfg.train)},
                          {"failure_budget", a.failure_budget}});

  const evreg::EnsembleResult result = evreg::circle_ensemble(data, cfg);
  evreg::write_ensemble_csv(result, out / "ensemble.csv");
  evreg::write_curve_csv(evreg::nu_curve(result), out / "nu_curve.csv", "nu");
  evreg::write_curve_csv(evreg::correlation_curve(result), out / "corr_curve.csv", "corr");

  json probes = json::array();
  evreg::RngStream boot = evreg::RngStream(a.seed).split(0xb007);
  for (double t : {0.1, evreg::kPi}) {
    std::vector<double> nus;
    for (const auto& m : result.models)
      if (m.converged) nus.push_back(evreg::evaluate_point(m.model, t).nu);
    if (nus.empty()) continue;
    const evreg::Interval ci = evreg::bootstrap_median_ci(nus, a.bootstrap, 0.95, boot);
    probes.push_back({{"t", t}, {"median_nu", evreg::quantile(nus, 0.5)}, {"ci95", {ci.lo, ci.hi}}});
  }
  json models = json::array();
  for (const auto& m : result.models)
    models.push_back({{"index", m.index}, {"seed", m.seed}, {"converged", m.converged}, {"final_loss", m.final_loss}});
  log.results() = {{"failed", result.failed}, {"models", models}, {"nu_probes", probes}};
  log.write(out / "provenance.json");

  std::cout << "ensemble: " << a.models - result.failed << " of " << a.models << " models converged\n";
  for (const auto& p : probes)
    std::cout << "  median nu at t=" << fmt(p["t"].get<double>()) << ": " << fmt(p["median_nu"].get<double>()) << '\n';
  if (static_cast<double>(result.failed) > a.failure_budget * static_cast<double>(a.models)) {
    std::cerr << "ensemble: " << result.failed << " failed models exceed the failure budget\n";
    return kExitRuntime;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multivariate deep evidential regression toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", EVREG_VERSION);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Sample the circle dataset");
  g->add_option("--count", gen.count, "Number of records")->check(CLI::Range(std::size_t{1}, std::size_t{100000000}));
  g->add_option("--noise", gen.noise, "Standard deviation of the radial noise")->check(CLI::NonNegativeNumber);
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--out", gen.out, "Output CSV path");

  TrainArgs tr;
  auto* t = app.add_subcommand("train", "Train one network on a dataset");
  t->add_option("--data", tr.data, "Dataset CSV")->required();
  t->add_option("--out", tr.out, "Output directory");
  t->add_option("--epochs", tr.epochs)->check(CLI::PositiveNumber);
  t->add_option("--batch-size", tr.batch_size, "0 for full batch");
  t->add_option("--lr", tr.lr, "Adam learning rate")->check(CLI::NonNegativeNumber);
  t->add_option("--seed", tr.seed);
  t->add_option("--r", tr.r, "Coupling nu = r * kappa");
  t->add_option("--nu-lo", tr.nu_lo);
  t->add_option("--nu-hi", tr.nu_hi);
  t->add_option("--hidden", tr.hidden, "Hidden layer widths")->delimiter(',')->check(CLI::PositiveNumber);

  PredictArgs pr;
  auto* p = app.add_subcommand("predict", "Evaluate a trained model");
  p->add_option("--model", pr.model, "model.json checkpoint")->required();
  p->add_option("--t", pr.t, "Inputs (default: uniform grid on [0, 2pi])")->delimiter(',');
  p->add_option("--grid-points", pr.grid_points)->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
  p->add_option("--out", pr.out, "Output CSV path");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run the oracle suite");
  v->add_option("--mc-samples", ver.opts.mc_samples)->check(CLI::Range(std::size_t{100}, std::size_t{1000000000}));
  v->add_option("--cases", ver.opts.mc_cases)->check(CLI::PositiveNumber);
  v->add_option("--gradient-points", ver.opts.gradient_points)->check(CLI::PositiveNumber);
  v->add_option("--seed", ver.opts.seed);
  v->add_option("--out", ver.out, "Output directory");
  v->add_flag("--inject-fault", ver.opts.inject_fault)->group("");

  DegenerationArgs deg;
  auto* d = app.add_subcommand("degeneration", "Scan the NIG loss along beta(1+kappa)/kappa = const");
  d->add_option("--alpha", deg.alpha)->check(CLI::PositiveNumber);
  d->add_option("--product", deg.product)->check(CLI::PositiveNumber);
  d->add_option("--y-minus-mu0", deg.y_minus_mu0);
  d->add_option("--lambda", deg.lambda)->check(CLI::NonNegativeNumber);
  d->add_option("--kappa-min", deg.kappa_min)->check(CLI::PositiveNumber);
  d->add_option("--kappa-max", deg.kappa_max)->check(CLI::PositiveNumber);
  d->add_option("--points", deg.points)->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
  d->add_option("--out", deg.out, "Output directory");

  BiasArgs bias;
  bias.cfg.jobs = default_jobs();
  auto* b = app.add_subcommand("bias-study", "Student-t fit residuals across sample sizes");
  b->add_option("--reps", bias.cfg.repetitions)->check(CLI::Range(std::size_t{2}, std::size_t{100000000}));
  b->add_option("--sizes", bias.cfg.sample_sizes)->delimiter(',')->check(CLI::Range(std::size_t{10}, std::size_t{100000000}));
  b->add_option("--gt-nu", bias.cfg.gt_nu)->check(CLI::PositiveNumber);
  b->add_option("--gt-mu", bias.cfg.gt_mu);
  b->add_option("--gt-sigma2", bias.cfg.gt_sigma2)->check(CLI::PositiveNumber);
  b->add_option("--nu-min", bias.cfg.bounds.nu_lo)->check(CLI::PositiveNumber);
  b->add_option("--nu-max", bias.cfg.bounds.nu_hi)->check(CLI::PositiveNumber);
  b->add_option("--seed", bias.cfg.seed);
  b->add_option("--jobs", bias.cfg.jobs)->check(CLI::PositiveNumber);
  b->add_option("--failure-budget", bias.failure_budget, "Tolerated fraction of diverged fits")->check(CLI::Range(0.0, 1.0));
  b->add_option("--out", bias.out, "Output directory");

  EnsembleArgs ens;
  auto* e = app.add_subcommand("ensemble", "Train an ensemble on the circle data");
  e->add_option("--data", ens.data, "Dataset CSV")->required();
  e->add_option("--models", ens.models)->check(CLI::PositiveNumber);
  e->add_option("--epochs", ens.epochs)->check(CLI::PositiveNumber);
  e->add_option("--batch-size", ens.batch_size, "0 for full batch");
  e->add_option("--lr", ens.lr)->check(CLI::NonNegativeNumber);
  e->add_option("--seed", ens.seed);
  e->add_option("--jobs", ens.jobs)->check(CLI::PositiveNumber);
  e->add_option("--grid-points", ens.grid_points)->check(CLI::Range(std::size_t{2}, std::size_t{10000000}));
  e->add_option("--r", ens.r);
  e->add_option("--nu-lo", ens.nu_lo);
  e->add_option("--nu-hi", ens.nu_hi);
  e->add_option("--hidden", ens.hidden)->delimiter(',')->check(CLI::PositiveNumber);
  e->add_option("--failure-budget", ens.failure_budget, "Tolerated fraction of failed models")->check(CLI::Range(0.0, 1.0));
  e->add_option("--bootstrap", ens.bootstrap, "Bootstrap resamples for the nu medians")->check(CLI::PositiveNumber);
  e->add_option("--out", ens.out, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& ex) {
    return app.exit(ex);
  } catch (const CLI::CallForVersion& ex) {
    return app.exit(ex);
  } catch (const CLI::ParseError& ex) {
    app.exit(ex);
    return kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*t) return cmd_train(tr);
    if (*p) return cmd_predict(pr);
    if (*v) return cmd_verify(ver);
    if (*d) return cmd_degeneration(deg);
    if (*b) return cmd_bias_study(bias);
    if (*e) return cmd_ensemble(ens);
  } catch (const UsageError& ex) {
    std::cerr << "usage error: " << ex.what() << '\n';
    return kExitUsage;
  } catch (const evreg::NonFiniteLoss& ex) {
    std::cerr << "error: non-finite loss at epoch " << ex.epoch << '\n';
    return kExitRuntime;
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}
