#include <doctest.h>

#include <cmath>
#include <limits>

#include "lentp/functional.hpp"
#include "lentp/quadrature.hpp"
#include "support.hpp"

using namespace lentp;
using testing::vec;

namespace {

const Configuration kTwoAtoms(1.0, 1, {Atom{0.2, vec({0.5})}, Atom{0.6, vec({-0.2})}});

IntensityModel shifted_box() {
  const Vector lo = vec({-0.5, -1.0});
  const Vector hi = vec({1.0, 0.5});
  return compound_poisson(1.0, lo, hi, [](const Vector&) { return 2.0; }, 2.0);
}

// Y_s on a configuration, straight from the definition.
Vector path_at(const Configuration& cfg, const Vector& mu, double s, bool left) {
  Vector y = -s * mu;
  for (const auto& a : cfg) {
    if (a.time < s || (!left && a.time == s)) y += a.mark;
  }
  return y;
}

double area_oracle(const Configuration& cfg, const Vector& mu, double t) {
  // Segment-by-segment integration of X1 dX2 - X2 dX1 with linear drift.
  double area = 0.0;
  double a = 0.0;
  Vector x = Vector::Zero(2);
  auto drift_piece = [&](double from, double to) {
    const double len = to - from;
    // int X1 (-mu2) ds - int X2 (-mu1) ds with X(s) = x - mu (s - from)
    const double int_x1 = x(0) * len - mu(0) * len * len / 2.0;
    const double int_x2 = x(1) * len - mu(1) * len * len / 2.0;
    area += -mu(1) * int_x1 + mu(0) * int_x2;
    x -= len * mu;
  };
  for (const auto& atom : cfg) {
    if (atom.time > t) break;
    drift_piece(a, atom.time);
    area += x(0) * atom.mark(1) - x(1) * atom.mark(0);
    x += atom.mark;
    a = atom.time;
  }
  drift_piece(a, t);
  return area;
}

std::vector<Configuration> random_configurations(int d, int count, std::uint64_t seed,
                                                 double lo = -0.8, double hi = 0.8) {
  Rng rng(seed);
  std::vector<Configuration> out;
  for (int i = 0; i < count; ++i) {
    out.push_back(testing::random_configuration(rng, d, 1 + static_cast<std::size_t>(i % 9), lo, hi));
  }
  return out;
}

// max over atoms of the closed/FD derivative gap, relative to the derivative scale
double closed_fd_gap(const Functional& f, const Configuration& cfg) {
  double worst = 0.0;
  for (const auto& a : cfg) {
    const Configuration bg = remove_particle(cfg, a);
    if (f.near_kink && f.near_kink(bg, a.time, a.mark)) continue;
    const Matrix closed = add_derivative(f, bg, a.time, a.mark, DerivativeMode::Closed);
    const Matrix fd = add_derivative(f, bg, a.time, a.mark, DerivativeMode::FiniteDifference);
    worst = std::max(worst, (closed - fd).norm() / std::max(1.0, closed.norm()));
  }
  return worst;
}

}  // namespace

TEST_CASE("path evaluation on the two-atom fixture") {
  const IntensityModel m = power_truncated(1.0, 0.5, 0.5, 0.05, true);
  const Functional f = make_path_eval(m, 1.0);
  CHECK(f.value(kTwoAtoms)(0) == doctest::Approx(0.3).epsilon(1e-15));
  CHECK(make_path_eval(m, 0.5).value(kTwoAtoms)(0) == doctest::Approx(0.5));
  CHECK(f.add_derivative(kTwoAtoms, 0.4, vec({1.0}))(0, 0) == 1.0);
  CHECK(make_path_eval(m, 0.5).add_derivative(kTwoAtoms, 0.7, vec({1.0}))(0, 0) == 0.0);
}

TEST_CASE("Doleans exponential against the literal product formula") {
  const IntensityModel m = power_truncated(1.0, 0.4, 0.3, 0.1, false);
  const double mu = m.mean()(0);
  const Functional f = make_doleans(m, 0.8);
  for (const auto& cfg : random_configurations(1, 50, 17)) {
    const double y = path_at(cfg, m.mean(), 0.8, false)(0);
    double oracle = std::exp(y);
    for (const auto& a : cfg) {
      if (a.time <= 0.8) oracle *= (1.0 + a.mark(0)) * std::exp(-a.mark(0));
    }
    CHECK(f.value(cfg)(0) == doctest::Approx(oracle).epsilon(1e-12));
  }
  CHECK(mu > 0.0);
  // fixture with zero compensator: 1.5 * 0.8
  const IntensityModel sym = power_truncated(1.0, 0.5, 0.5, 0.05, true);
  CHECK(make_doleans(sym, 1.0).value(kTwoAtoms)(0) == doctest::Approx(1.2).epsilon(1e-14));
  const Configuration bad(1.0, 1, {Atom{0.3, vec({-1.0})}});
  CHECK_THROWS_AS(make_doleans(sym, 1.0).value(bad), Error);
}

TEST_CASE("Levy area on a hand-computed configuration") {
  const IntensityModel m = testing::centred_box(2, 4.0);
  const Configuration cfg(1.0, 2, {Atom{0.2, vec({1.0, 0.0})}, Atom{0.5, vec({0.0, 1.0})}});
  const Vector v = make_stochastic_area(m, 1.0).value(cfg);
  CHECK(v(0) == doctest::Approx(1.0));
  CHECK(v(1) == doctest::Approx(1.0));
  CHECK(v(2) == doctest::Approx(1.0));
  const Matrix d = make_stochastic_area(m, 1.0).add_derivative(remove_particle(cfg, cfg[0]), 0.2, vec({1.0, 0.0}));
  CHECK(d(2, 0) == doctest::Approx(1.0));
  CHECK(d(2, 1) == doctest::Approx(0.0));
}

TEST_CASE("Levy area with drift matches segment integration") {
  const IntensityModel m = shifted_box();
  REQUIRE(m.mean().norm() > 0.1);
  const Functional f = make_stochastic_area(m, 0.9);
  for (const auto& cfg : random_configurations(2, 40, 23)) {
    CHECK(f.value(cfg)(2) == doctest::Approx(area_oracle(cfg, m.mean(), 0.9)).epsilon(1e-12));
  }
}

TEST_CASE("time integral against adaptive quadrature of the path") {
  const IntensityModel m = shifted_box();
  VectorMap g;
  g.value = [](const Vector& y) { return vec({std::sin(y(0)) * y(1), std::cos(y(1))}); };
  g.jacobian = [](const Vector& y) {
    Matrix j(2, 2);
    j << std::cos(y(0)) * y(1), std::sin(y(0)), 0.0, -std::sin(y(1));
    return j;
  };
  const Functional f = make_time_integral(m, g, 0.7);
  for (const auto& cfg : random_configurations(2, 10, 29)) {
    // breakpoints split the quadrature so every piece is smooth
    std::vector<double> cuts{0.0};
    for (const auto& a : cfg) {
      if (a.time < 0.7) cuts.push_back(a.time);
    }
    cuts.push_back(0.7);
    Vector oracle = Vector::Zero(2);
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      for (int c = 0; c < 2; ++c) {
        const double mid = 0.5 * (cuts[k] + cuts[k + 1]);
        const Vector jumps = path_at(cfg, m.mean(), mid, false) + mid * m.mean();
        oracle(c) += gauss_kronrod([&](double s) { return g.value(jumps - s * m.mean())(c); },
                                   cuts[k], cuts[k + 1], 1e-13).value;
      }
    }
    CHECK((f.value(cfg) - oracle).norm() < 1e-10);
  }
  VectorMap identity;
  identity.value = [](const Vector& y) { return y; };
  identity.jacobian = [](const Vector& y) { return Matrix::Identity(y.size(), y.size()).eval(); };
  const Configuration one(1.0, 1, {Atom{0.25, vec({1.0})}});
  const IntensityModel sym = power_truncated(1.0, 0.5, 0.5, 0.05, true);
  const Functional h = make_time_integral(sym, identity, 1.0);
  CHECK(h.value(one)(0) == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(h.add_derivative(Configuration(1.0, 1), 0.25, vec({1.0}))(0, 0) == doctest::Approx(0.75));
}

TEST_CASE("generalised Ornstein-Uhlenbeck against direct quadrature") {
  const IntensityModel m = shifted_box();
  const double x0 = 0.7;
  const Functional f = make_generalized_ou(m, x0, 0.9);
  for (const auto& cfg : random_configurations(2, 20, 31)) {
    const Vector mu = m.mean();
    auto xi = [&](double s) { return path_at(cfg, mu, s, false)(0); };
    double jump_part = 0.0;
    for (const auto& a : cfg) {
      if (a.time <= 0.9) jump_part += std::exp(-path_at(cfg, mu, a.time, true)(0)) * a.mark(1);
    }
    std::vector<double> cuts{0.0};
    for (const auto& a : cfg) {
      if (a.time < 0.9) cuts.push_back(a.time);
    }
    cuts.push_back(0.9);
    double drift = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
      const double lo = cuts[k];
      const double start = path_at(cfg, mu, lo, false)(0) + lo * mu(0);
      drift += gauss_kronrod([&](double s) { return std::exp(-(start - s * mu(0))); }, lo, cuts[k + 1], 1e-14).value;
    }
    const double oracle = std::exp(xi(0.9)) * (x0 + jump_part - mu(1) * drift);
    CHECK(f.value(cfg)(0) == doctest::Approx(oracle).epsilon(1e-11));
  }
  const IntensityModel centred = testing::centred_box(2, 4.0);
  const Configuration one(1.0, 2, {Atom{0.3, vec({std::log(2.0), 1.0})}});
  CHECK(make_generalized_ou(centred, 1.0, 1.0).value(one)(0) == doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("running supremum against a dense grid") {
  const IntensityModel m = power_truncated(1.0, 0.4, 0.3, 0.1, false);
  PiecewiseConstant k;
  k.breaks = {0.3, 0.6};
  k.values = {0.0, 0.2, -0.1};
  const Functional f = make_running_sup(m, 0.95, k);
  for (const auto& cfg : random_configurations(1, 30, 37)) {
    double oracle = -std::numeric_limits<double>::infinity();
    const int n = 20000;
    for (int i = 0; i <= n; ++i) {
      const double s = 0.95 * i / n;
      oracle = std::max(oracle, path_at(cfg, m.mean(), s, false)(0) + k.at(s));
    }
    for (const auto& a : cfg) {
      if (a.time <= 0.95) {
        oracle = std::max(oracle, path_at(cfg, m.mean(), a.time, false)(0) + k.at(a.time));
        oracle = std::max(oracle, path_at(cfg, m.mean(), a.time, true)(0) + k.left_limit(a.time));
      }
    }
    for (double b : k.breaks) oracle = std::max(oracle, path_at(cfg, m.mean(), b, true)(0) + k.left_limit(b));
    const double value = f.value(cfg)(0);
    CHECK(value >= oracle - 1e-12);
    CHECK(value <= oracle + m.mean()(0) * 0.95 / n + 1e-12);
  }
}

TEST_CASE("nearest point") {
  const IntensityModel m = polar(1.0, 0.1);
  const Functional f = make_nearest_point(m);
  CHECK(std::isinf(f.value(Configuration(1.0, 2))(0)));
  const Configuration cfg(1.0, 2, {Atom{0.1, vec({0.3, 0.4})}, Atom{0.5, vec({0.0, -0.9})}});
  CHECK(f.value(cfg)(0) == doctest::Approx(0.5));
  const Matrix d = f.add_derivative(remove_particle(cfg, cfg[0]), 0.1, cfg[0].mark);
  CHECK(d(0, 0) == doctest::Approx(0.6));
  CHECK(d(0, 1) == doctest::Approx(0.8));
  CHECK(f.add_derivative(remove_particle(cfg, cfg[1]), 0.5, cfg[1].mark).norm() == 0.0);
}

TEST_CASE("triangular jump SDE") {
  const IntensityModel centred = testing::centred_box(2, 4.0);
  const Configuration one(1.0, 2, {Atom{0.4, vec({0.5, 0.3})}});
  const Vector z = make_triangular_sde(centred, Vector::Zero(3), 1.0, 0.01).value(one);
  CHECK(z(0) == doctest::Approx(0.5));
  CHECK(z(1) == doctest::Approx(0.3));
  CHECK(z(2) == doctest::Approx(0.6));
  // generic Euler with the compensator computed by quadrature agrees
  JumpSde generic = triangular_sde(shifted_box());
  generic.compensator = nullptr;
  const Functional a = make_jump_sde(shifted_box(), generic, vec({0.1, 0.2, 0.3}), 0.9, 0.05);
  const Functional b = make_triangular_sde(shifted_box(), vec({0.1, 0.2, 0.3}), 0.9, 0.05);
  for (const auto& cfg : random_configurations(2, 5, 41)) {
    CHECK((a.value(cfg) - b.value(cfg)).norm() < 1e-9);
  }
  CHECK_FALSE(a.has_closed_derivative);
}

TEST_CASE("closed derivatives agree with central differences") {
  const IntensityModel one_d = power_truncated(1.0, 0.4, 0.3, 0.1, false);
  const IntensityModel two_d = shifted_box();
  VectorMap g;
  g.value = [](const Vector& y) { return y.array().sin().matrix().eval(); };
  g.jacobian = [](const Vector& y) { return Matrix(y.array().cos().matrix().asDiagonal()); };
  const std::vector<Functional> fs1 = {
      make_path_eval(one_d, 0.7), make_doleans(one_d, 0.9), make_pair_doleans(one_d, 1.0),
      make_time_integral(one_d, g, 0.8), make_running_sup(one_d, 0.9)};
  const std::vector<Functional> fs2 = {
      make_stochastic_area(two_d, 0.8), make_generalized_ou(two_d, 0.5, 0.9),
      make_triangular_sde(two_d, vec({0.1, -0.2, 0.3}), 1.0, 0.02), make_time_integral(two_d, g, 1.0),
      make_nearest_point(two_d)};
  for (const auto& f : fs1) {
    for (const auto& cfg : random_configurations(1, 40, 43)) CHECK_MESSAGE(closed_fd_gap(f, cfg) < 1e-7, f.label);
  }
  for (const auto& f : fs2) {
    for (const auto& cfg : random_configurations(2, 40, 47)) CHECK_MESSAGE(closed_fd_gap(f, cfg) < 1e-7, f.label);
  }
}

TEST_CASE("stack and compose") {
  const IntensityModel m = power_truncated(1.0, 0.5, 0.5, 0.05, true);
  const Functional s = stack({make_path_eval(m, 1.0), make_doleans(m, 1.0)});
  CHECK(s.out_dim == 2);
  CHECK(s.value(kTwoAtoms)(1) == doctest::Approx(1.2));
  SmoothMap product{[](const Vector& v) { return v(0) * v(1); },
                    [](const Vector& v) { return vec({v(1), v(0)}); }};
  const Functional c = compose(product, s);
  CHECK(c.value(kTwoAtoms)(0) == doctest::Approx(0.36));
  CHECK(closed_fd_gap(c, kTwoAtoms) < 1e-8);
  CHECK_THROWS_AS(stack({make_path_eval(m, 1.0), make_stochastic_area(testing::centred_box(2, 1.0), 1.0)}), Error);
}

TEST_CASE("factories validate their arguments") {
  const IntensityModel one_d = power_truncated(1.0, 0.5, 0.5, 0.05, true);
  const IntensityModel two_d = testing::centred_box(2, 4.0);
  CHECK_THROWS_AS(make_path_eval(one_d, 1.5), Error);
  CHECK_THROWS_AS(make_path_eval(one_d, 0.0), Error);
  CHECK_THROWS_AS(make_doleans(two_d, 1.0), Error);
  CHECK_THROWS_AS(make_stochastic_area(one_d, 1.0), Error);
  CHECK_THROWS_AS(make_generalized_ou(one_d, 1.0, 1.0), Error);
  CHECK_THROWS_AS(make_running_sup(two_d, 1.0), Error);
  CHECK_THROWS_AS(make_triangular_sde(two_d, vec({0.0}), 1.0, 0.1), Error);
  CHECK_THROWS_AS(make_triangular_sde(two_d, vec({0.0, 0.0, 0.0}), 1.0, 0.0), Error);
  PiecewiseConstant bad;
  bad.breaks = {0.5};
  CHECK_THROWS_AS(make_running_sup(one_d, 1.0, bad), Error);
}
