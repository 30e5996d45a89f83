#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "lentp/parallel.hpp"
#include "lentp/quadrature.hpp"
#include "lentp/random.hpp"
#include "support.hpp"

using namespace lentp;

TEST_CASE("streams depend only on their coordinates") {
  Rng a = Rng::stream(7, 1, 2, 3);
  Rng b = Rng::stream(7, 1, 2, 3);
  Rng c = Rng::stream(7, 1, 2, 4);
  bool differs = false;
  for (int i = 0; i < 16; ++i) {
    const auto x = a();
    CHECK(x == b());
    differs = differs || x != c();
  }
  CHECK(differs);
}

TEST_CASE("uniform draws stay in range and have the right moments") {
  Rng rng(42);
  double sum = 0.0;
  double sum_sq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    REQUIRE(u >= 0.0);
    REQUIRE(u < 1.0);
    const double v = rng.uniform_open();
    REQUIRE(v > 0.0);
    REQUIRE(v < 1.0);
    sum += u;
    sum_sq += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sum_sq / n - 1.0 / 3.0) < 0.005);
}

TEST_CASE("poisson sampler matches mean and variance") {
  for (double mean : {0.5, 7.0, 350.0}) {
    Rng rng(mix64(static_cast<std::uint64_t>(mean * 10)));
    const int n = 50000;
    double s = 0.0;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
      const double k = static_cast<double>(rng.poisson(mean));
      s += k;
      ss += k * k;
    }
    const double m = s / n;
    const double var = ss / n - m * m;
    CHECK(std::abs(m - mean) < 4.0 * std::sqrt(mean / n));
    CHECK(std::abs(var / mean - 1.0) < 0.05);
  }
}

TEST_CASE("normal sampler has unit variance") {
  Rng rng(3);
  double s = 0.0;
  double ss = 0.0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    s += z;
    ss += z * z;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(ss / n - 1.0) < 0.02);
}

TEST_CASE("parallel_map output does not depend on the worker count") {
  auto f = [](std::size_t i) {
    Rng r = Rng::stream(9, i);
    return r.uniform();
  };
  const auto one = parallel_map<double>(1000, 1, f);
  const auto many = parallel_map<double>(1000, 7, f);
  CHECK(one == many);
}

TEST_CASE("parallel_for rethrows worker exceptions") {
  CHECK_THROWS_AS(parallel_for(100, 4,
                               [](std::size_t i) {
                                 if (i == 57) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
}

TEST_CASE("Gauss-Kronrod integrates smooth and peaked functions") {
  CHECK(gauss_kronrod([](double x) { return std::exp(x); }, 0.0, 1.0).value ==
        doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  CHECK(gauss_kronrod([](double x) { return std::sin(x); }, 0.0, std::numbers::pi).value ==
        doctest::Approx(2.0).epsilon(1e-13));
  const double peak = gauss_kronrod([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0).value;
  CHECK(peak == doctest::Approx(2.0 / 1e-2 * std::atan(1.0 / 1e-2)).epsilon(1e-10));
}

TEST_CASE("Gauss-Kronrod reports an exhausted interval budget") {
  CHECK_THROWS_AS(gauss_kronrod([](double x) { return std::sin(1.0 / (x + 1e-9)); }, 0.0, 1.0,
                                1e-14, 8),
                  Error);
}

TEST_CASE("box quadrature of a separable polynomial") {
  const double v = integrate_box([](const Vector& x) { return x(0) * x(0) * (1.0 + x(1)); },
                                 testing::vec({0.0, 0.0}), testing::vec({1.0, 2.0}));
  CHECK(v == doctest::Approx((1.0 / 3.0) * 4.0).epsilon(1e-12));
}

TEST_CASE("eight-point Gauss-Legendre is exact through degree 15") {
  const double v = gauss_legendre8([](double x) { return std::pow(x, 15) + 3.0 * std::pow(x, 4); }, -1.0, 2.0);
  const double exact = (std::pow(2.0, 16) - 1.0) / 16.0 + 3.0 * (32.0 + 1.0) / 5.0;
  CHECK(v == doctest::Approx(exact).epsilon(1e-13));
  const Vector w = gauss_legendre8<Vector>([](double x) { return testing::vec({x, x * x}); }, 0.0, 1.0);
  CHECK(w(0) == doctest::Approx(0.5));
  CHECK(w(1) == doctest::Approx(1.0 / 3.0));
}
