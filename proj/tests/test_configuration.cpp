#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "lentp/configuration.hpp"
#include "support.hpp"

using namespace lentp;
using testing::vec;

TEST_CASE("power model rate and mean match closed forms") {
  const double c = 0.5, a = 0.5, eps = 0.05;
  const IntensityModel sym = power_truncated(1.0, c, a, eps, true);
  const double side = c * (std::pow(eps, -a) - 1.0) / a;
  CHECK(sym.rate() == doctest::Approx(2.0 * side).epsilon(1e-14));
  CHECK(std::abs(sym.mean()(0)) < 1e-15);
  const IntensityModel one = power_truncated(1.0, c, a, eps, false);
  CHECK(one.mean()(0) == doctest::Approx(c * (1.0 - std::pow(eps, 1.0 - a)) / (1.0 - a)).epsilon(1e-10));
  const IntensityModel cauchy = power_truncated(2.0, 1.0, 1.0, eps, false);
  CHECK(cauchy.mean()(0) == doctest::Approx(-std::log(eps)).epsilon(1e-10));
}

TEST_CASE("model constructors reject bad parameters") {
  CHECK_THROWS_AS(power_truncated(1.0, 0.5, 0.5, 1.5, true), Error);
  CHECK_THROWS_AS(power_truncated(1.0, -1.0, 0.5, 0.1, true), Error);
  CHECK_THROWS_AS(polar(1.0, 0.0), Error);
  CHECK_THROWS_AS(atomic_dyadic(1.0, 2, 5), Error);
  CHECK_THROWS_AS(compound_poisson(1.0, vec({1.0}), vec({0.0}), [](const Vector&) { return 1.0; }, 1.0), Error);
}

TEST_CASE("polar and curve-image models integrate consistently") {
  const IntensityModel p = polar(1.0, 0.1);
  CHECK(p.rate() == doctest::Approx(2.0 * std::numbers::pi * std::log(10.0)).epsilon(1e-12));
  // int |x|^2 dtheta drho/rho = 2 pi (1 - eps^2)/2
  CHECK(p.sigma_integrate([](const Vector& x) { return x.squaredNorm(); }) ==
        doctest::Approx(std::numbers::pi * (1.0 - 0.01)).epsilon(1e-10));
  const IntensityModel base = power_truncated(1.0, 0.5, 0.5, 0.05, true);
  const IntensityModel curve = curve_image(base, [](double u) { return vec({u, u * u}); }, 2);
  CHECK(curve.rate() == doctest::Approx(base.rate()));
  CHECK(curve.mean()(1) ==
        doctest::Approx(base.sigma_integrate([](const Vector& x) { return x(0) * x(0); })).epsilon(1e-12));
}

TEST_CASE("dyadic model is a finite sum of unit atoms") {
  const IntensityModel m = atomic_dyadic(1.0, 10);
  CHECK_FALSE(m.diffuse());
  CHECK(m.rate() == 11.0);
  CHECK(m.mean()(0) == doctest::Approx(2.0 - std::ldexp(1.0, -10)).epsilon(1e-15));
}

TEST_CASE("rescaling sets the expected count") {
  const IntensityModel m = with_expected_count(polar(2.0, 0.1), 20.0);
  CHECK(m.rate() * m.horizon() == doctest::Approx(20.0).epsilon(1e-14));
  const IntensityModel both = superpose({power_truncated(1.0, 0.5, 0.5, 0.1, false), atomic_dyadic(1.0, 3)});
  CHECK(both.rate() == doctest::Approx(power_truncated(1.0, 0.5, 0.5, 0.1, false).rate() + 4.0));
}

TEST_CASE("sampled configurations have Poisson counts and ordered times") {
  const IntensityModel m = with_expected_count(power_truncated(1.0, 0.5, 0.5, 0.05, true), 10.0);
  double s = 0.0;
  double ss = 0.0;
  double mark_sum = 0.0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const Configuration cfg = sample_configuration(m, static_cast<std::uint64_t>(i));
    const double k = static_cast<double>(cfg.size());
    s += k;
    ss += k * k;
    for (std::size_t j = 0; j < cfg.size(); ++j) {
      REQUIRE(std::abs(cfg[j].mark(0)) > 0.05 - 1e-15);
      REQUIRE(std::abs(cfg[j].mark(0)) <= 1.0);
      if (j > 0) REQUIRE(cfg[j - 1].time < cfg[j].time);
      mark_sum += std::abs(cfg[j].mark(0));
    }
  }
  CHECK(std::abs(s / n - 10.0) < 4.0 * std::sqrt(10.0 / n));
  CHECK(std::abs((ss / n - (s / n) * (s / n)) / 10.0 - 1.0) < 0.05);
  // E sum |x| = T int |x| dsigma
  const double expected = m.sigma_integrate([](const Vector& x) { return std::abs(x(0)); });
  CHECK(mark_sum / n == doctest::Approx(expected).epsilon(0.02));
}

TEST_CASE("sampling is reproducible from the seed") {
  const IntensityModel m = polar(1.0, 0.1);
  CHECK(sample_configuration(m, 11) == sample_configuration(m, 11));
  CHECK_FALSE(sample_configuration(m, 11) == sample_configuration(m, 12));
}

TEST_CASE("creation and annihilation") {
  const Configuration cfg(1.0, 1, {Atom{0.2, vec({0.5})}, Atom{0.6, vec({-0.2})}});
  const Atom extra{0.4, vec({0.3})};
  const Configuration plus = add_particle(cfg, extra);
  CHECK(plus.size() == 3);
  CHECK(plus[1] == extra);
  CHECK(remove_particle(plus, extra) == cfg);
  // the lent atom is already there: identity
  CHECK(add_particle(cfg, cfg[0]) == cfg);
  // absent atom: identity
  CHECK(remove_particle(cfg, extra) == cfg);
  CHECK_THROWS_AS(add_particle(cfg, Atom{0.2, vec({0.1})}), Error);
  CHECK_THROWS_AS(add_particle(cfg, Atom{1.5, vec({0.1})}), Error);
  CHECK_THROWS_AS(add_particle(cfg, Atom{0.3, vec({0.1, 0.2})}), Error);
}

TEST_CASE("add then remove is the identity on random configurations") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Configuration cfg = testing::random_configuration(rng, 2, trial % 7, -1.0, 1.0);
    const Atom a{rng.uniform_open(), vec({rng.uniform(), rng.uniform()})};
    REQUIRE(remove_particle(add_particle(cfg, a), a) == cfg);
    for (const auto& b : cfg) REQUIRE(add_particle(remove_particle(cfg, b), b) == cfg);
  }
}

TEST_CASE("configuration validation") {
  CHECK_THROWS_AS(Configuration(1.0, 1, {Atom{0.6, vec({1.0})}, Atom{0.2, vec({1.0})}}), Error);
  CHECK_THROWS_AS(Configuration(1.0, 1, {Atom{0.2, vec({1.0})}, Atom{0.2, vec({2.0})}}), Error);
  CHECK_THROWS_AS(Configuration(1.0, 2, {Atom{0.2, vec({1.0})}}), Error);
  const Configuration sorted =
      Configuration::from_unsorted(1.0, 1, {Atom{0.6, vec({1.0})}, Atom{0.2, vec({2.0})}});
  CHECK(sorted[0].time == 0.2);
}

TEST_CASE("text round trip is exact") {
  const IntensityModel m = polar(1.0, 0.1);
  const Configuration cfg = sample_configuration(m, 99);
  std::stringstream s;
  write_configuration(s, cfg);
  CHECK(read_configuration(s) == cfg);
  std::stringstream bad("1 1 2\n0.6 1\n0.2 1\n");
  CHECK_THROWS_AS(read_configuration(bad), Error);
  std::stringstream truncated("1 1 2\n0.2 1\n");
  CHECK_THROWS_AS(read_configuration(truncated), Error);
}

TEST_CASE("compensated integrals") {
  const IntensityModel m = testing::centred_box(1, 4.0);
  const Configuration cfg(1.0, 1, {Atom{0.2, vec({0.5})}, Atom{0.6, vec({-0.2})}});
  CHECK(integrate(cfg, [](double t, const Vector& x) { return t * x(0); }) == doctest::Approx(0.1 - 0.12));
  // nu(x^2) = 4 * (1/2) * (2/3)
  CHECK(compensated_integrate(cfg, m, [](const Vector& x) { return x(0) * x(0); }) ==
        doctest::Approx(0.29 - 4.0 / 3.0).epsilon(1e-12));
  CHECK(compensated_integrate(cfg, m, [](double t, const Vector& x) { return t * x(0) * x(0); }) ==
        doctest::Approx(0.05 + 0.024 - 2.0 / 3.0).epsilon(1e-10));
}

TEST_CASE("auxiliary marks are uniform and seed-determined") {
  const Configuration cfg = sample_configuration(with_expected_count(polar(1.0, 0.1), 50.0), 3);
  const MarkedConfiguration a = attach_marks(cfg, 8);
  const MarkedConfiguration b = attach_marks(cfg, 8);
  CHECK(a.aux_marks == b.aux_marks);
  CHECK(a.aux_marks.size() == cfg.size());
  for (double r : a.aux_marks) {
    CHECK(r >= 0.0);
    CHECK(r < 1.0);
  }
}
