#include <doctest.h>

#include <cmath>
#include <set>

#ifdef EVREG_HAVE_BOOST
#include <boost/math/special_functions/digamma.hpp>
#endif

#include "evreg/errors.hpp"
#include "evreg/rng.hpp"
#include "evreg/special.hpp"

using namespace evreg;

TEST_CASE("log_gamma agrees with libm") {
  for (double x : {1e-8, 0.01, 0.3, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 55.5, 171.3, 1e4}) {
    CHECK(std::abs(log_gamma(x) - std::lgamma(x)) <= 1e-13 * std::max(1.0, std::abs(std::lgamma(x))));
  }
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_gamma(0.5) == doctest::Approx(0.5 * std::log(kPi)).epsilon(1e-14));
  CHECK_THROWS_AS(log_gamma(0.0), DomainError);
  CHECK_THROWS_AS(log_gamma(-2.5), DomainError);
}

TEST_CASE("digamma") {
  constexpr double euler_gamma = 0.57721566490153286;
  CHECK(digamma(1.0) == doctest::Approx(-euler_gamma).epsilon(1e-14));
  CHECK(digamma(0.5) == doctest::Approx(-euler_gamma - 2.0 * std::log(2.0)).epsilon(1e-14));
  // ψ(x + 1) = ψ(x) + 1/x
  for (double x : {0.1, 0.7, 2.3, 9.9, 40.0}) CHECK(digamma(x + 1.0) == doctest::Approx(digamma(x) + 1.0 / x).epsilon(1e-13));
#ifdef EVREG_HAVE_BOOST
  for (double x : {1e-3, 0.25, 1.75, 3.0, 7.5, 12.0, 150.0}) {
    CHECK(std::abs(digamma(x) - boost::math::digamma(x)) <= 1e-13 * std::max(1.0, std::abs(boost::math::digamma(x))));
  }
#endif
}

TEST_CASE("digamma is the derivative of log_gamma") {
  for (double x : {0.8, 2.5, 6.0, 20.0}) {
    const double h = 1e-5;
    const double fd = (log_gamma(x + h) - log_gamma(x - h)) / (2.0 * h);
    CHECK(fd == doctest::Approx(digamma(x)).epsilon(1e-8));
  }
}

TEST_CASE("multivariate log gamma is a product of gammas") {
  for (int n : {1, 2, 3, 5}) {
    const double a = 4.2;
    double expected = 0.25 * n * (n - 1) * std::log(kPi);
    for (int j = 1; j <= n; ++j) expected += std::lgamma(a + 0.5 * (1 - j));
    CHECK(log_multigamma(n, a) == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("rng streams are deterministic and splittable") {
  RngStream a(42);
  RngStream b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RngStream root(42);
  const std::uint64_t before = root.counter();
  RngStream c1 = root.split(1);
  RngStream c1_again = root.split(1);
  RngStream c2 = root.split(2);
  CHECK(root.counter() == before);
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 50; ++i) {
    const std::uint64_t x = c1.next_u64();
    CHECK(x == c1_again.next_u64());
    seen.insert(x);
    seen.insert(c2.next_u64());
  }
  CHECK(seen.size() == 100);
  CHECK(RngStream(1).next_u64() != RngStream(2).next_u64());
}

TEST_CASE("uniform and normal moments") {
  RngStream rng(7);
  const int count = 200000;
  double su = 0.0, su2 = 0.0, sn = 0.0, sn2 = 0.0;
  for (int i = 0; i < count; ++i) {
    const double u = rng.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    su2 += u * u;
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(std::abs(su / count - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / count));
  CHECK(std::abs(su2 / count - 1.0 / 3.0) < 4.0 * std::sqrt((1.0 / 5.0 - 1.0 / 9.0) / count));
  CHECK(std::abs(sn / count) < 4.0 / std::sqrt(count));
  CHECK(std::abs(sn2 / count - 1.0) < 4.0 * std::sqrt(2.0 / count));
}

TEST_CASE("gamma draws match their mean and variance") {
  RngStream rng(8);
  for (double shape : {0.3, 1.0, 2.5, 11.0}) {
    const int count = 100000;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < count; ++i) {
      const double g = rng.gamma(shape);
      REQUIRE(g > 0.0);
      s += g;
      s2 += g * g;
    }
    const double mean = s / count;
    const double var = s2 / count - mean * mean;
    CHECK(std::abs(mean - shape) < 4.0 * std::sqrt(shape / count));
    // var of the sample variance of a gamma: (μ4 - σ⁴)/N with μ4 = 3k² + 6k
    CHECK(std::abs(var - shape) < 4.0 * std::sqrt((3.0 * shape * shape + 6.0 * shape - shape * shape) / count));
  }
  CHECK_THROWS_AS(rng.gamma(0.0), DomainError);
}
