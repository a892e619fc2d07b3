#include <doctest.h>

#include <cmath>

#ifdef EVREG_HAVE_BOOST
#include <boost/math/distributions/students_t.hpp>
#endif

#include "evreg/distributions.hpp"
#include "evreg/errors.hpp"
#include "evreg/special.hpp"
#include "support.hpp"

using namespace evreg;

namespace {

EvidentialParams niw2(double kappa, double nu) {
  const double rows[] = {1.2, 0.0, 0.3, 0.8};
  return EvidentialParams{{0.4, -0.3}, CholeskyFactor::from_lower(2, rows), kappa, nu};
}

}  // namespace

TEST_CASE("mvn_logpdf closed cases") {
  const Vector zero1{0.0};
  CHECK(mvn_logpdf(zero1, zero1, CholeskyFactor::identity(1)) == doctest::Approx(-0.9189385).epsilon(1e-7));
  const Vector x{0.3, -0.7};
  CHECK(mvn_logpdf(x, x, CholeskyFactor::identity(2)) == doctest::Approx(-1.8378771).epsilon(1e-7));
}

TEST_CASE("mvn density integrates to one in 2-D") {
  const double rows[] = {1.0, 0.0, 0.6, 0.7};
  const CholeskyFactor l = CholeskyFactor::from_lower(2, rows);
  const Vector mu{0.5, -0.2};
  const int steps = 400;
  const double lo = -8.0, hi = 8.0, h = (hi - lo) / steps;
  double total = 0.0;
  for (int i = 0; i <= steps; ++i) {
    for (int j = 0; j <= steps; ++j) {
      const double w = ((i == 0 || i == steps) ? 0.5 : 1.0) * ((j == 0 || j == steps) ? 0.5 : 1.0);
      const Vector x{lo + i * h, lo + j * h};
      total += w * std::exp(mvn_logpdf(x, mu, l));
    }
  }
  CHECK(std::abs(total * h * h - 1.0) <= 1e-3);
}

TEST_CASE("inverse gamma density") {
  CHECK(inv_gamma_logpdf(1.0, 1.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-14));

  double best_x = 0.0, best = -1e300;
  for (int i = 1; i <= 40000; ++i) {
    const double x = i * 1e-4;
    const double v = inv_gamma_logpdf(x, 3.0, 8.0);
    if (v > best) {
      best = v;
      best_x = x;
    }
  }
  CHECK(best_x == doctest::Approx(2.0).epsilon(1e-4));

  const double mass = testing::simpson([](double x) { return x <= 0.0 ? 0.0 : std::exp(inv_gamma_logpdf(x, 2.0, 3.0)); },
                                       0.0, 200.0, 400000);
  // Beyond 200 the density is ≈ β^α/Γ(α)·x^(-α-1), leaving a tail of 4.5/200².
  CHECK(std::abs(mass + 4.5 / (200.0 * 200.0) - 1.0) <= 1e-4);
  CHECK_THROWS_AS(inv_gamma_logpdf(-1.0, 1.0, 1.0), DomainError);
}

TEST_CASE("inverse Wishart reduces to inverse gamma at n = 1") {
  const double psi = 2.0;
  const CholeskyFactor l = CholeskyFactor::from_lower(1, std::vector<double>{std::sqrt(psi)});
  SymMatrix s(1);
  s.set(0, 0, 1.5);
  CHECK(std::abs(inv_wishart_logpdf(s, l, 4.0) - inv_gamma_logpdf(1.5, 2.0, 1.0)) <= 1e-12);
}

TEST_CASE("inverse Wishart mode along scaled identities") {
  // With Ψ = I the mode Ψ/(ν+n+1) lies on the ray c·I.
  const double nu = 6.0;
  double best_c = 0.0, best = -1e300;
  for (int i = 1; i < 100000; ++i) {
    const double c = i * 1e-5;
    const double v = inv_wishart_logpdf(SymMatrix::identity(2).scaled(c), CholeskyFactor::identity(2), nu);
    if (v > best) {
      best = v;
      best_c = c;
    }
  }
  CHECK(best_c == doctest::Approx(1.0 / (nu + 3.0)).epsilon(1e-4));
}

TEST_CASE("inverse Wishart density integrates to one in 2-D") {
  // Σ = [[a, ρ√(ac)], [ρ√(ac), c]] with a = e^u, c = e^v; dΣ = a c √(ac) du dv dρ.
  const double rows[] = {1.4, 0.0, 0.35, 0.9};
  const CholeskyFactor psi = CholeskyFactor::from_lower(2, rows);
  const double nu = 7.0;
  const auto inner = [&](double u, double v) {
    return testing::simpson(
        [&](double rho) {
          if (std::abs(rho) >= 1.0) return 0.0;
          const double a = std::exp(u), c = std::exp(v);
          SymMatrix s(2);
          s.set(0, 0, a);
          s.set(1, 1, c);
          s.set(1, 0, rho * std::sqrt(a * c));
          return std::exp(inv_wishart_logpdf(s, psi, nu)) * a * c * std::sqrt(a * c);
        },
        -1.0, 1.0, 120);
  };
  const double total = testing::simpson(
      [&](double u) { return testing::simpson([&](double v) { return inner(u, v); }, -9.0, 6.0, 120); }, -9.0, 6.0, 120);
  CHECK(std::abs(total - 1.0) <= 2e-3);
}

TEST_CASE("niw_logpdf factorizes") {
  const EvidentialParams m = niw2(1.7, 6.0);
  const Vector mu{0.1, 0.2};
  const double rows[] = {0.5, 0.1, 0.1, 0.4};
  const SymMatrix sigma = SymMatrix::from_rows(2, rows);
  const double gauss = mvn_logpdf(mu, m.mu0, cholesky(sigma.scaled(1.0 / m.kappa)));
  const double iw = inv_wishart_logpdf(sigma, m.psi_chol, m.nu);
  CHECK(niw_logpdf(mu, sigma, m) == gauss + iw);

  EvidentialParams doubled = m;
  doubled.kappa *= 2.0;
  const double delta_gauss = mvn_logpdf(mu, m.mu0, cholesky(sigma.scaled(1.0 / doubled.kappa))) - gauss;
  CHECK(niw_logpdf(mu, sigma, doubled) - niw_logpdf(mu, sigma, m) == doctest::Approx(delta_gauss).epsilon(1e-12));
}

TEST_CASE("niw_logpdf matches a raw 2x2 formula") {
  RngStream rng(21);
  for (int k = 0; k < 20; ++k) {
    const EvidentialParams m = testing::random_niw(2, rng);
    const SymMatrix sigma = testing::random_spd(2, rng).scaled(0.3);
    const Vector mu{rng.normal(), rng.normal()};
    const SymMatrix psi = m.psi();
    const double det_s = sigma(0, 0) * sigma(1, 1) - sigma(0, 1) * sigma(0, 1);
    const double det_p = psi(0, 0) * psi(1, 1) - psi(0, 1) * psi(0, 1);
    // Σ⁻¹ by the adjugate
    const double i00 = sigma(1, 1) / det_s, i11 = sigma(0, 0) / det_s, i01 = -sigma(0, 1) / det_s;
    const double d0 = mu[0] - m.mu0[0], d1 = mu[1] - m.mu0[1];
    const double quad = i00 * d0 * d0 + 2.0 * i01 * d0 * d1 + i11 * d1 * d1;
    const double trace = psi(0, 0) * i00 + 2.0 * psi(0, 1) * i01 + psi(1, 1) * i11;
    const double gauss = -std::log(2.0 * kPi) - 0.5 * std::log(det_s / (m.kappa * m.kappa)) - 0.5 * m.kappa * quad;
    const double gamma2 = 0.5 * std::log(kPi) + std::lgamma(0.5 * m.nu) + std::lgamma(0.5 * (m.nu - 1.0));
    const double iw = 0.5 * m.nu * std::log(det_p) - m.nu * std::log(2.0) - gamma2 -
                      0.5 * (m.nu + 3.0) * std::log(det_s) - 0.5 * trace;
    CHECK(std::abs(niw_logpdf(mu, sigma, m) - (gauss + iw)) <= 1e-12 * std::max(1.0, std::abs(gauss + iw)));
  }
}

TEST_CASE("sample_niw reproduces the closed-form moments") {
  const EvidentialParams m = niw2(1.5, 10.0);
  const Moments mo = niw_moments(m);
  RngStream rng(22);
  const int count = 100000;
  double s_mu[2] = {0, 0}, s_mu2[2] = {0, 0};
  double s_sig[3] = {0, 0, 0}, s_sig2[3] = {0, 0, 0};
  double s_dev[3] = {0, 0, 0}, s_dev2[3] = {0, 0, 0};
  for (int k = 0; k < count; ++k) {
    const auto [mu, sigma] = sample_niw(m, rng);
    const double e[3] = {sigma(0, 0), sigma(1, 0), sigma(1, 1)};
    const double d0 = mu[0] - m.mu0[0], d1 = mu[1] - m.mu0[1];
    const double dd[3] = {d0 * d0, d1 * d0, d1 * d1};
    for (int i = 0; i < 2; ++i) {
      s_mu[i] += mu[i];
      s_mu2[i] += mu[i] * mu[i];
    }
    for (int i = 0; i < 3; ++i) {
      s_sig[i] += e[i];
      s_sig2[i] += e[i] * e[i];
      s_dev[i] += dd[i];
      s_dev2[i] += dd[i] * dd[i];
    }
  }
  const auto within = [&](double sum, double sum2, double target) {
    const double mean = sum / count;
    const double se = std::sqrt((sum2 / count - mean * mean) / count);
    return std::abs(mean - target) <= 4.0 * se;
  };
  for (int i = 0; i < 2; ++i) CHECK(within(s_mu[i], s_mu2[i], mo.mean[i]));
  const double ale[3] = {mo.aleatoric(0, 0), mo.aleatoric(1, 0), mo.aleatoric(1, 1)};
  const double epi[3] = {mo.epistemic(0, 0), mo.epistemic(1, 0), mo.epistemic(1, 1)};
  for (int i = 0; i < 3; ++i) {
    CHECK(within(s_sig[i], s_sig2[i], ale[i]));
    CHECK(within(s_dev[i], s_dev2[i], epi[i]));
  }
}

TEST_CASE("niw and nig moments") {
  const NigParams p{0.0, 1.0, 3.0, 4.0};
  const Moments mo = niw_moments(to_evidential(p));
  CHECK(mo.aleatoric(0, 0) == doctest::Approx(2.0).epsilon(1e-14));

  RngStream rng(23);
  EvidentialParams m = testing::random_niw(3, rng);
  m.kappa = 5.0;
  const Moments r = niw_moments(m);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) CHECK(r.epistemic(i, j) == doctest::Approx(0.2 * r.aleatoric(i, j)).epsilon(1e-14));

  const EvidentialParams id{{0.0, 0.0}, CholeskyFactor::identity(2), 2.0, 5.0};
  const Moments mi = niw_moments(id);
  CHECK(mi.aleatoric(0, 0) == doctest::Approx(0.5));
  CHECK(mi.aleatoric(1, 0) == 0.0);
  CHECK(mi.epistemic(1, 1) == doctest::Approx(0.25));

  const Moments nm = nig_moments(NigParams{0.0, 1.0, 2.0, 1.0});
  CHECK(nm.mean[0] == 0.0);
  CHECK(nm.aleatoric(0, 0) == doctest::Approx(1.0));
  CHECK(nm.epistemic(0, 0) == doctest::Approx(1.0));

  const NigParams q{0.3, 2.5, 3.5, 1.7};
  const Moments a = nig_moments(q);
  const Moments b = niw_moments(to_evidential(q));
  CHECK(std::abs(a.aleatoric(0, 0) - b.aleatoric(0, 0)) <= 1e-12);
  CHECK(std::abs(a.epistemic(0, 0) - b.epistemic(0, 0)) <= 1e-12);

  CHECK_THROWS_AS(nig_moments(NigParams{0.0, 1.0, 1.0, 1.0}), DomainError);
  CHECK_NOTHROW(nig_moments(NigParams{0.0, 1.0, 1.0 + 1e-9, 1.0}));
  CHECK_THROWS_AS(niw_moments(EvidentialParams{{0.0, 0.0}, CholeskyFactor::identity(2), 1.0, 3.0}), DomainError);
}

TEST_CASE("posterior update counts virtual observations") {
  const EvidentialParams prior{{0.0}, CholeskyFactor::identity(1), 1.0, 3.0};
  const std::vector<Vector> three{{1.0}, {2.0}, {0.5}};
  const EvidentialParams post = posterior_update(prior, three);
  CHECK(post.kappa == 4.0);
  CHECK(post.nu == 6.0);

  const EvidentialParams p2{{0.0}, CholeskyFactor::identity(1), 2.0, 3.0};
  const std::vector<Vector> ones{{1.0}, {1.0}};
  CHECK(posterior_update(p2, ones).mu0[0] == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("posterior update is associative") {
  RngStream rng(24);
  for (std::size_t n = 1; n <= 3; ++n) {
    const EvidentialParams prior = testing::random_niw(n, rng);
    std::vector<Vector> a(4, Vector(n)), b(3, Vector(n));
    for (auto* set : {&a, &b})
      for (auto& y : *set)
        for (double& v : y) v = 1.5 * rng.normal();
    std::vector<Vector> all = a;
    all.insert(all.end(), b.begin(), b.end());
    const EvidentialParams joint = posterior_update(prior, all);
    const EvidentialParams chained = posterior_update(posterior_update(prior, a), b);
    CHECK(std::abs(joint.kappa - chained.kappa) <= 1e-10);
    CHECK(std::abs(joint.nu - chained.nu) <= 1e-10);
    for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(joint.mu0[i] - chained.mu0[i]) <= 1e-10);
    const SymMatrix pj = joint.psi(), pc = chained.psi();
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) CHECK(std::abs(pj(i, j) - pc(i, j)) <= 1e-10 * std::max(1.0, std::abs(pj(i, j))));
  }
}

TEST_CASE("posterior update matches a dense-grid posterior in 1-D") {
  const double mu0 = 0.2, kappa = 1.5, nu = 4.0, psi = 2.0;
  const std::vector<Vector> data{{0.9}, {1.4}, {-0.3}, {0.7}, {1.1}};
  const EvidentialParams post =
      posterior_update(EvidentialParams{{mu0}, CholeskyFactor::from_lower(1, std::vector<double>{std::sqrt(psi)}), kappa, nu},
                       data);
  // Unnormalized prior × likelihood written from the raw densities, on (μ, log σ²).
  const auto log_joint = [&](double mu, double s2) {
    double lp = -0.5 * std::log(s2 / kappa) - 0.5 * kappa * (mu - mu0) * (mu - mu0) / s2;
    lp += -(0.5 * nu + 1.0) * std::log(s2) - 0.5 * psi / s2;
    for (const auto& y : data) lp += -0.5 * std::log(s2) - 0.5 * (y[0] - mu) * (y[0] - mu) / s2;
    return lp;
  };
  const int nm = 600, ns = 600;
  const double m_lo = -3.0, m_hi = 4.0, l_lo = std::log(1e-3), l_hi = std::log(50.0);
  double z = 0.0, e_mu = 0.0, e_s2 = 0.0;
  for (int i = 0; i <= nm; ++i) {
    const double mu = m_lo + (m_hi - m_lo) * i / nm;
    for (int j = 0; j <= ns; ++j) {
      const double ls = l_lo + (l_hi - l_lo) * j / ns;
      const double s2 = std::exp(ls);
      const double w = std::exp(log_joint(mu, s2)) * s2;  // ds² = s² d log s²
      z += w;
      e_mu += w * mu;
      e_s2 += w * s2;
    }
  }
  const Moments mo = niw_moments(post);
  CHECK(std::abs(e_mu / z - mo.mean[0]) <= 1e-3);
  CHECK(std::abs(e_s2 / z - mo.aleatoric(0, 0)) <= 1e-3);
}

TEST_CASE("model evidence at n = 1 is the univariate Student-t") {
  RngStream rng(25);
  for (int k = 0; k < 50; ++k) {
    const double mu0 = rng.normal(), kappa = 0.2 + 4.0 * rng.uniform(), nu = 0.5 + 9.0 * rng.uniform();
    const double sigma02 = 0.1 + 3.0 * rng.uniform();
    const EvidentialParams m{{mu0}, CholeskyFactor::from_lower(1, std::vector<double>{std::sqrt(nu * sigma02)}), kappa, nu};
    const double y = mu0 + 2.0 * rng.normal();
    const double yv[1] = {y};
    const double expected = student_t_logpdf(y, nu, mu0, (1.0 + kappa) / kappa * sigma02);
    CHECK(std::abs(model_evidence_logpdf(yv, m) - expected) <= 1e-12 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("model evidence approaches the Cauchy peak") {
  const EvidentialParams m{{0.0}, CholeskyFactor::identity(1), 1e12, 1.0};
  const double y[1] = {0.0};
  CHECK(std::exp(model_evidence_logpdf(y, m)) == doctest::Approx(1.0 / kPi).epsilon(1e-9));
}

TEST_CASE("model evidence equals the multivariate t form") {
  RngStream rng(26);
  for (std::size_t n = 1; n <= 4; ++n) {
    const EvidentialParams m = testing::random_niw(n, rng);
    Vector y(n);
    for (double& v : y) v = rng.normal();
    const double dof = m.nu - static_cast<double>(n) + 1.0;
    const CholeskyFactor scale = m.psi_chol.scaled((1.0 + m.kappa) / (m.kappa * dof));
    CHECK(model_evidence_logpdf(y, m) == doctest::Approx(mvt_logpdf(y, dof, m.mu0, scale)).epsilon(1e-12));
  }
}

TEST_CASE("Monte Carlo evidence") {
  const EvidentialParams m{{0.0}, CholeskyFactor::identity(1), 1.0, 4.0};
  RngStream rng(27);
  const double far[1] = {60.0};
  const McEstimate tail = model_evidence_mc(far, m, 20000, rng);
  CHECK(tail.estimate < 1e-12);
  CHECK(tail.std_error < 1e-12);

  const double y[1] = {0.8};
  const McEstimate est = model_evidence_mc(y, m, 1000000, rng);
  CHECK(std::abs(est.estimate - std::exp(model_evidence_logpdf(y, m))) <= 3.0 * est.std_error);

  RngStream other(99);
  const McEstimate again = model_evidence_mc(y, m, 1000000, other);
  CHECK(std::abs(again.estimate - est.estimate) <= 3.0 * std::hypot(est.std_error, again.std_error));
}

TEST_CASE("Student-t log density") {
  CHECK(student_t_logpdf(0.0, 1.0, 0.0, 1.0) == doctest::Approx(-std::log(kPi)).epsilon(1e-14));
  const double z[1] = {0.7}, zero[1] = {0.0};
  CHECK(std::abs(student_t_logpdf(0.7, 1e6, 0.0, 1.0) - mvn_logpdf(z, zero, CholeskyFactor::identity(1))) <= 1e-5);
  // x = tan θ maps the real line onto (-π/2, π/2).
  const double mass = testing::simpson(
      [](double th) {
        if (std::abs(th) >= 0.5 * kPi) return 0.0;
        const double c = std::cos(th);
        return std::exp(student_t_logpdf(std::tan(th), 2.0, 0.0, 1.0)) / (c * c);
      },
      -0.5 * kPi, 0.5 * kPi, 20000);
  CHECK(std::abs(mass - 1.0) <= 1e-4);
#ifdef EVREG_HAVE_BOOST
  for (double nu : {0.7, 2.0, 5.5, 30.0}) {
    boost::math::students_t dist(nu);
    for (double x : {-4.0, -0.3, 0.0, 1.2, 9.0}) {
      const double expected = std::log(boost::math::pdf(dist, (x - 0.5) / 1.5)) - std::log(1.5);
      CHECK(student_t_logpdf(x, nu, 0.5, 2.25) == doctest::Approx(expected).epsilon(1e-12));
    }
  }
#endif
}

TEST_CASE("parameter validation") {
  const Vector y{0.0, 0.0};
  EvidentialParams bad = niw2(-1.0, 5.0);
  CHECK_THROWS_AS(model_evidence_logpdf(y, bad), DomainError);
  const Vector y3{0.0, 0.0, 0.0};
  CHECK_THROWS_AS(model_evidence_logpdf(y3, niw2(1.0, 5.0)), DimensionMismatch);
  CHECK_THROWS_AS(model_evidence_logpdf(y, niw2(1.0, 0.9)), DomainError);
  CHECK_THROWS_AS(student_t_logpdf(0.0, 0.0, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(posterior_update(niw2(1.0, 5.0), std::vector<Vector>{}), DimensionMismatch);
}
