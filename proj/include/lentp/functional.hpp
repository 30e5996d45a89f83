#ifndef LENTP_FUNCTIONAL_HPP
#define LENTP_FUNCTIONAL_HPP

#include <functional>
#include <string>
#include <vector>

#include "lentp/configuration.hpp"
#include "lentp/intensity.hpp"
#include "lentp/types.hpp"

namespace lentp {

enum class DerivativeMode { Closed, FiniteDifference };

// A Poisson functional F: configurations -> R^m together with its
// added-particle derivative
//
//   add_derivative(cfg, t, x) = d/dx F(add_particle(cfg, (t, x)))   (m x d).
//
// The derivative is taken in the mark only; the time t is a parameter.
struct Functional {
  int out_dim = 1;
  int mark_dim = 1;
  std::function<Vector(const Configuration&)> value;
  std::function<Matrix(const Configuration&, double, const Vector&)> add_derivative;
  bool has_closed_derivative = false;
  std::string label;
  /// Optional: true when (cfg, t, x) sits close to a point where F is not
  /// differentiable in x, so finite differences are unreliable there.
  std::function<bool(const Configuration&, double, const Vector&)> near_kink;
};

/// Central-difference step for a mark coordinate.
double fd_step(double x);

/// Central differences of value(add_particle(cfg, (t, x))) in x.
Matrix fd_add_derivative(const Functional& f, const Configuration& cfg, double t,
                         const Vector& x);

/// Closed derivative when requested and available, finite differences otherwise.
Matrix add_derivative(const Functional& f, const Configuration& cfg, double t, const Vector& x,
                      DerivativeMode mode);

/// Right-continuous piecewise-constant function: values[k] on [breaks[k-1], breaks[k]).
struct PiecewiseConstant {
  std::vector<double> breaks;
  std::vector<double> values{0.0};

  double at(double s) const;
  double left_limit(double s) const;
};

/// g: R^d -> R^m with Jacobian.
struct VectorMap {
  std::function<Vector(const Vector&)> value;
  std::function<Matrix(const Vector&)> jacobian;
};

/// Pure-jump SDE coefficient c(s, X_{s-}, u) and, optionally, its
/// compensator \int c(s, X, u) sigma(du) in closed form.
struct JumpSde {
  int state_dim = 1;
  std::function<Vector(double, const Vector&, const Vector&)> coefficient;
  std::function<Vector(double, const Vector&)> compensator;
};

/// Y_t = sum_{t_i <= t} x_i - t mu.
Functional make_path_eval(const IntensityModel& model, double t);
/// Doleans exponential e^{Y_t} prod (1 + dY) e^{-dY}, d = 1.
Functional make_doleans(const IntensityModel& model, double t);
/// (Y_t, Exp(Y)_t).
Functional make_pair_doleans(const IntensityModel& model, double t);
/// (X_1(t), X_2(t), int X_1(s-) dX_2 - int X_2(s-) dX_1), d = 2.
Functional make_stochastic_area(const IntensityModel& model, double t);
/// int_0^t g(Y_s) ds with 8-point Gauss-Legendre on each inter-jump segment.
Functional make_time_integral(const IntensityModel& model, VectorMap g, double t = 1.0);
/// e^{xi_t}(x0 + int_0^t e^{-xi_{s-}} d eta_s), marks (xi-jump, eta-jump).
Functional make_generalized_ou(const IntensityModel& model, double x0, double t);
/// sup_{s <= t} (Y_s + K_s), d = 1.
Functional make_running_sup(const IntensityModel& model, double t,
                            PiecewiseConstant k = PiecewiseConstant{});
/// min_i |x_i|; +inf on the empty configuration.
Functional make_nearest_point(const IntensityModel& model);
/// Euler scheme of step delta for X_t = x0 + int c(s, X_{s-}, u) Ntilde(ds, du).
Functional make_jump_sde(const IntensityModel& model, JumpSde sde, const Vector& x0, double t,
                         double delta);
/// Triangular three-dimensional system driven by a planar Levy process.
JumpSde triangular_sde(const IntensityModel& model);
/// The triangular system with its closed added-particle derivative.
Functional make_triangular_sde(const IntensityModel& model, const Vector& z0, double t, double delta);
/// Constant functional.
Functional make_constant(const Vector& c, int mark_dim);

/// Concatenates functionals sharing the mark dimension.
Functional stack(const std::vector<Functional>& fs);
/// phi o F, scalar-valued; closed derivative by the chain rule at the
/// augmented configuration.
Functional compose(const SmoothMap& phi, const Functional& f);

}  // namespace lentp

#endif  // LENTP_FUNCTIONAL_HPP
