#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "lentp/diagnostics.hpp"
#include "support.hpp"

using namespace lentp;
using testing::vec;

namespace {

const IntensityModel kSymmetric = power_truncated(1.0, 0.5, 0.5, 0.05, true);

double n_of(const Configuration& cfg, const MarkFn& f) {
  double total = 0.0;
  for (const auto& a : cfg) total += f(a.mark);
  return total;
}

MarkedIntegrand r_free(double scale) {
  return MarkedIntegrand{
      [scale](const Configuration&, const Atom& a, double) { return std::exp(-scale * a.mark.squaredNorm()); },
      [scale](const Configuration&, const Atom& a) { return std::exp(-scale * a.mark.squaredNorm()); },
      [scale](const Configuration&, const Atom& a) { return std::exp(-2.0 * scale * a.mark.squaredNorm()); }};
}

}  // namespace

TEST_CASE("Laplace functional") {
  const EstimatorReport zero = laplace_check(kSymmetric, [](const Vector&) { return 0.0; }, 500, 1);
  CHECK(zero.estimate == std::complex<double>(1.0, 0.0));
  CHECK(zero.reference == std::complex<double>(1.0, 0.0));
  CHECK(zero.pass);
  const MarkFn f = [](const Vector& x) { return 0.3 * x(0) + 0.2 * x(0) * x(0); };
  const MarkFn g = [&](const Vector& x) { return -f(x); };
  const EstimatorReport plus = laplace_check(kSymmetric, f, 2000, 5);
  const EstimatorReport minus = laplace_check(kSymmetric, g, 2000, 5);
  CHECK(std::abs(plus.estimate - std::conj(minus.estimate)) < 1e-13);
  CHECK(std::abs(plus.reference - std::conj(minus.reference)) < 1e-13);
  // f = c 1_A on the box [-1, 1] with nu(A) = 2
  const IntensityModel box = testing::centred_box(1, 4.0);
  const double c = 0.7;
  const EstimatorReport ind = laplace_check(box, [c](const Vector& x) { return x(0) > 0.0 ? c : 0.0; }, 20000, 9);
  const std::complex<double> expected = std::exp(-2.0 * (1.0 - std::exp(std::complex<double>(0.0, c)) +
                                                         std::complex<double>(0.0, c)));
  CHECK(std::abs(ind.reference - expected) < 1e-9);
  CHECK(ind.pass);
  CHECK(laplace_check(kSymmetric, [](const Vector& x) { return 0.3 * x(0); }, 20000, 3).pass);
}

TEST_CASE("creation and annihilation duality") {
  const MarkFn sq = [](const Vector& x) { return x(0) * x(0); };
  const double nu_sq = kSymmetric.horizon() * kSymmetric.sigma_integrate(sq);
  const auto one = duality_check(kSymmetric, [](const Configuration&) { return 1.0; }, sq, 4000, 2);
  CHECK(one.second.reference.real() == doctest::Approx(nu_sq).epsilon(1e-14));
  CHECK(one.first.pass);
  CHECK(one.second.pass);
  const auto nothing = duality_check(kSymmetric, [](const Configuration& c) { return double(c.size()); },
                                     [](const Vector&) { return 0.0; }, 500, 2);
  CHECK(nothing.first.estimate == 0.0);
  CHECK(nothing.first.reference == 0.0);
  CHECK(nothing.second.pass);
  const auto weighted = duality_check(kSymmetric, [&](const Configuration& c) { return std::exp(-n_of(c, sq)); },
                                      sq, 20000, 4);
  CHECK(weighted.first.pass);
  CHECK(weighted.second.pass);
}

TEST_CASE("marked second moment") {
  const IntensityModel box = testing::centred_box(1, 4.0);
  CHECK(marked_moment_check(box, r_free(1.0), 300, 3).pass);
  const MarkedIntegrand centred{
      [](const Configuration&, const Atom& a, double r) { return a.mark(0) * (r - 0.5); },
      [](const Configuration&, const Atom&) { return 0.0; },
      [](const Configuration&, const Atom& a) { return a.mark(0) * a.mark(0) / 12.0; }};
  const EstimatorReport r = marked_moment_check(box, centred, 20000, 5);
  CHECK(r.pass);
  // reference is E N(x^2) / 12 = T sigma(x^2) / 12 = (4/3) / 12 up to sampling
  CHECK(r.reference.real() == doctest::Approx(4.0 / 36.0).epsilon(0.05));
}

TEST_CASE("mark-expectation identities") {
  const IntensityModel box = testing::centred_box(1, 4.0);
  const auto exact = mark_identities_check(box, r_free(0.5), 300, 4, 8);
  CHECK(exact.first.pass);
  CHECK(exact.second.pass);
  CHECK(exact.first.gap() <= 1e-12);
  CHECK(exact.second.gap() <= 1e-12);
  const IntensityModel empty = with_expected_count(box, 1e-9);
  const auto nothing = mark_identities_check(empty, r_free(0.5), 100, 2, 8);
  CHECK(nothing.first.estimate == 1.0);
  CHECK(nothing.first.reference == 1.0);
  CHECK(nothing.second.estimate == 0.0);
  const MarkedIntegrand gaussian_r{
      [](const Configuration&, const Atom& a, double r) { return std::exp(-a.mark.squaredNorm() * r); },
      [](const Configuration&, const Atom& a) {
        const double s = a.mark.squaredNorm();
        return s == 0.0 ? 1.0 : -std::expm1(-s) / s;
      },
      nullptr};
  const auto mc = mark_identities_check(box, gaussian_r, 5000, 8, 10);
  CHECK(mc.first.pass);
  CHECK(mc.second.pass);
  const MarkedIntegrand too_big{[](const Configuration&, const Atom&, double r) { return 1.0 + r; },
                                [](const Configuration&, const Atom&) { return 1.5; }, nullptr};
  CHECK_THROWS_AS(mark_identities_check(box, too_big, 50, 2, 1), Error);
}

TEST_CASE("kernel density estimates") {
  const IntensityModel m20 = with_expected_count(kSymmetric, 20.0);
  const KdeResult flat = kde(make_constant(vec({2.5}), 1), m20, 100, 1);
  CHECK(flat.degenerate);
  CHECK(flat.atom(0) == 2.5);
  const KdeResult path = kde(make_path_eval(m20, 1.0), m20, 20000, 3);
  CHECK_FALSE(path.degenerate);
  CHECK(path.integral == doctest::Approx(1.0).epsilon(1e-3));
  CHECK(path.density.minCoeff() >= 0.0);
  // |int (p(x) - p(-x)) dx| via the point evaluator on a symmetric grid
  std::vector<double> xs;
  for (const auto& v : sample_functional(make_path_eval(m20, 1.0), m20, 20000, 3)) xs.push_back(v(0));
  const double h = silverman_bandwidth(xs);
  double asym = 0.0;
  const int n = 400;
  const double reach = 4.0;
  for (int i = 0; i <= n; ++i) {
    const double x = -reach + 2.0 * reach * i / n;
    asym += (kde_at(xs, h, x) - kde_at(xs, h, -x)) * (2.0 * reach / n) * (i == 0 || i == n ? 0.5 : 1.0);
  }
  CHECK(std::abs(asym) <= 0.05);
  const KdeResult pair = kde(make_pair_doleans(m20, 1.0), m20, 4000, 5);
  CHECK(pair.dim == 2);
  CHECK(pair.integral == doctest::Approx(1.0).epsilon(1e-3));
  std::ostringstream csv;
  write_kde_csv(csv, path);
  CHECK(csv.str().rfind("x,density\n", 0) == 0);
}

TEST_CASE("empirical characteristic function") {
  const IntensityModel m20 = with_expected_count(kSymmetric, 20.0);
  const std::vector<double> grid = {0.0, 1.0, 5.0, 20.0};
  const EcfCurve zero = ecf(make_constant(vec({0.0}), 1), m20, 200, grid, 1);
  for (double v : zero.modulus) CHECK(v == doctest::Approx(1.0).epsilon(1e-14));
  const EcfCurve path = ecf(make_path_eval(m20, 1.0), m20, 20000, grid, 2);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(std::abs(path.modulus[i] - levy_modulus(m20, 1.0, grid[i])) <= 4.0 * path.se[i]);
  }
  CHECK(levy_modulus(m20, 1.0, 20.0) < 0.1);
}

TEST_CASE("Rajchman construction") {
  const RajchmanDemo demo = rajchman_demo(30, 8, 20000, 7);
  CHECK(demo.limit == doctest::Approx(std::exp(-3.3946)).epsilon(1e-4));
  CHECK(demo.rows.size() == 9);
  for (const auto& row : demo.rows) {
    CHECK(row.closed == doctest::Approx(demo.limit).epsilon(1e-6));
    CHECK(std::abs(row.monte_carlo - row.closed) <= 4.0 * row.se + 1.0 / std::sqrt(20000.0));
  }
}

TEST_CASE("truncation ladder") {
  const TruncationLadder ladder = ecf_truncation_ladder(0.5, 0.5, {0.1, 0.01, 0.001}, {1.0, 10.0, 100.0});
  CHECK(ladder.rows.size() == 9);
  CHECK(ladder.monotone);
}

TEST_CASE("statistical suite size and determinism") {
  const auto a = statistical_suite(400, 3, 1);
  const auto b = statistical_suite(400, 3, 3);
  REQUIRE(a.size() == 40);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].name == b[i].name);
    CHECK(a[i].estimate == b[i].estimate);
  }
}
