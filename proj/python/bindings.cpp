#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "evreg/datagen.hpp"
#include "evreg/distributions.hpp"
#include "evreg/errors.hpp"
#include "evreg/experiments.hpp"
#include "evreg/losses.hpp"
#include "evreg/net.hpp"
#include "evreg/verify.hpp"

namespace py = pybind11;
using namespace evreg;

namespace {

using Matrix = std::vector<std::vector<double>>;

SymMatrix to_sym(const Matrix& rows) {
  const std::size_t n = rows.size();
  Vector flat;
  flat.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw DimensionMismatch("matrix must be square");
    flat.insert(flat.end(), r.begin(), r.end());
  }
  return SymMatrix::from_rows(n, flat);
}

Matrix to_rows(const SymMatrix& m) {
  Matrix out(m.dim(), std::vector<double>(m.dim()));
  for (std::size_t i = 0; i < m.dim(); ++i)
    for (std::size_t j = 0; j < m.dim(); ++j) out[i][j] = m(i, j);
  return out;
}

EvidentialParams make_niw(Vector mu0, const Matrix& psi, double kappa, double nu) {
  EvidentialParams m{std::move(mu0), cholesky(to_sym(psi)), kappa, nu};
  m.validate();
  return m;
}

py::dict loss_dict(const LossValue& lv) {
  py::dict d;
  d["value"] = lv.value;
  d["gradient"] = lv.gradient;
  return d;
}

}  // namespace

PYBIND11_MODULE(_evreg, m) {
  m.doc() = "Multivariate deep evidential regression: densities, losses, training and studies.";

  // Translators run most recent first, so the base class goes in first.
  py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);
  py::register_exception<NotPositiveDefinite>(m, "NotPositiveDefinite", PyExc_ValueError);

  py::class_<EvidentialParams>(m, "NIW")
      .def(py::init(&make_niw), py::arg("mu0"), py::arg("psi"), py::arg("kappa"), py::arg("nu"))
      .def_readonly("mu0", &EvidentialParams::mu0)
      .def_readonly("kappa", &EvidentialParams::kappa)
      .def_readonly("nu", &EvidentialParams::nu)
      .def_property_readonly("psi", [](const EvidentialParams& p) { return to_rows(p.psi()); })
      .def_property_readonly("dim", &EvidentialParams::dim);

  py::class_<NigParams>(m, "NIG")
      .def(py::init([](double mu0, double kappa, double alpha, double beta) {
             return NigParams{mu0, kappa, alpha, beta};
           }),
           py::arg("mu0"), py::arg("kappa"), py::arg("alpha"), py::arg("beta"))
      .def_readwrite("mu0", &NigParams::mu0)
      .def_readwrite("kappa", &NigParams::kappa)
      .def_readwrite("alpha", &NigParams::alpha)
      .def_readwrite("beta", &NigParams::beta)
      .def("to_niw", &to_evidential);

  m.def(
      "model_evidence_logpdf", [](const Vector& y, const EvidentialParams& p) { return model_evidence_logpdf(y, p); },
      py::arg("y"), py::arg("niw"));
  m.def(
      "model_evidence_mc",
      [](const Vector& y, const EvidentialParams& p, std::size_t samples, std::uint64_t seed) {
        RngStream rng(seed);
        const McEstimate e = model_evidence_mc(y, p, samples, rng);
        return py::make_tuple(e.estimate, e.std_error);
      },
      py::arg("y"), py::arg("niw"), py::arg("samples"), py::arg("seed") = 0);
  m.def(
      "posterior_update", [](const EvidentialParams& p, const std::vector<Vector>& data) {
        return posterior_update(p, data);
      },
      py::arg("prior"), py::arg("data"));
  m.def(
      "niw_moments",
      [](const EvidentialParams& p) {
        const Moments mo = niw_moments(p);
        return py::make_tuple(mo.mean, to_rows(mo.aleatoric), to_rows(mo.epistemic));
      },
      py::arg("niw"));
  m.def(
      "sample_niw",
      [](const EvidentialParams& p, std::size_t count, std::uint64_t seed) {
        RngStream rng(seed);
        std::vector<py::tuple> out;
        for (std::size_t i = 0; i < count; ++i) {
          auto [mu, sigma] = sample_niw(p, rng);
          out.push_back(py::make_tuple(mu, to_rows(sigma)));
        }
        return out;
      },
      py::arg("niw"), py::arg("count"), py::arg("seed") = 0);
  m.def("student_t_logpdf", &student_t_logpdf, py::arg("x"), py::arg("nu"), py::arg("mu"), py::arg("sigma2"));

  m.def(
      "nig_nll", [](double y, const NigParams& p) { return loss_dict(nig_nll(y, p)); }, py::arg("y"), py::arg("nig"));
  m.def(
      "niw_nll", [](const Vector& y, const EvidentialParams& p) { return loss_dict(niw_nll(y, p)); }, py::arg("y"),
      py::arg("niw"));
  m.def(
      "coupled_niw_nll",
      [](const Vector& y, const Vector& mu0, const Vector& ell, double nu, double r) {
        return loss_dict(coupled_niw_nll(y, CoupledHeadParams{mu0, ell, nu, r}));
      },
      py::arg("y"), py::arg("mu0"), py::arg("ell"), py::arg("nu"), py::arg("r") = 1.0);

  m.def(
      "circle_dataset",
      [](std::size_t count, double noise, std::uint64_t seed) {
        const Dataset d = circle_dataset(CircleConfig{count, noise, seed});
        std::vector<double> t;
        std::vector<Vector> y;
        for (const auto& r : d.records) {
          t.push_back(r.t);
          y.push_back(r.y);
        }
        return py::make_tuple(t, y);
      },
      py::arg("count") = 300, py::arg("noise") = 0.1, py::arg("seed") = 0);

  m.def(
      "fit_student_t",
      [](const std::vector<double>& samples, double nu_lo, double nu_hi) {
        const TFit f = fit_student_t(samples, TFitBounds{nu_lo, nu_hi});
        py::dict d;
        d["nu"] = f.nu;
        d["mu"] = f.mu;
        d["sigma2"] = f.sigma2;
        d["log_likelihood"] = f.log_likelihood;
        return d;
      },
      py::arg("samples"), py::arg("nu_lo") = 0.5, py::arg("nu_hi") = 100.0);

  m.def(
      "degeneration_nll",
      [](double alpha, double y_minus_mu0, double product, const std::vector<double>& kappas) {
        std::vector<double> out;
        for (const auto& r : degeneration_scan(alpha, y_minus_mu0, product, kappas)) out.push_back(r.nll);
        return out;
      },
      py::arg("alpha"), py::arg("y_minus_mu0"), py::arg("product"), py::arg("kappas"));

  py::class_<ModelState>(m, "Model")
      .def_property_readonly("parameter_count", &ModelState::parameter_count)
      .def("save", [](const ModelState& s, const std::filesystem::path& p) { save_model(s, p); })
      .def_static("load", &load_model)
      .def(
          "predict",
          [](const ModelState& s, double t) {
            const double in[1] = {t};
            const UncertaintyReport r = predict(s, in);
            py::dict d;
            d["prediction"] = r.prediction;
            d["aleatoric"] = to_rows(r.aleatoric);
            d["epistemic"] = to_rows(r.epistemic);
            d["nu"] = r.nu;
            return d;
          },
          py::arg("t"));

  m.def(
      "train_circle",
      [](const std::vector<double>& t, const std::vector<Vector>& y, std::size_t epochs, double lr, std::uint64_t seed) {
        if (t.size() != y.size()) throw DimensionMismatch("t and y must have equal length");
        Dataset d;
        d.n = 2;
        for (std::size_t i = 0; i < t.size(); ++i) d.records.push_back(Record{t[i], y[i]});
        TrainConfig tc;
        tc.epochs = epochs;
        tc.learning_rate = lr;
        tc.seed = seed + 1;
        TrainResult res;
        {
          py::gil_scoped_release release;
          res = train(init(NetworkConfig{}, seed), d, tc);
        }
        return py::make_tuple(std::move(res.model), res.history);
      },
      py::arg("t"), py::arg("y"), py::arg("epochs") = 2000, py::arg("lr") = 1e-3, py::arg("seed") = 0);

  m.def(
      "verify",
      [](std::size_t mc_samples, std::uint64_t seed) {
        VerifyOptions o;
        o.mc_samples = mc_samples;
        o.seed = seed;
        std::vector<py::tuple> out;
        for (const auto& c : run_verification(o)) out.push_back(py::make_tuple(c.name, c.passed, c.detail));
        return out;
      },
      py::arg("mc_samples") = 200000, py::arg("seed") = 1);
}
