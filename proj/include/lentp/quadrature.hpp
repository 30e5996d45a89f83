#ifndef LENTP_QUADRATURE_HPP
#define LENTP_QUADRATURE_HPP

#include <functional>

#include "lentp/types.hpp"

namespace lentp {

inline constexpr double kQuadratureTolerance = 1e-10;

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;
  int intervals = 0;
};

/// Globally adaptive Gauss-Kronrod (7/15) on [a, b]. Throws
/// Error(Quadrature) with the achieved error when the interval budget runs out.
QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               double abs_tol = kQuadratureTolerance,
                               int max_intervals = 20000);

/// Nested adaptive Gauss-Kronrod over the box [lo, hi].
double integrate_box(const std::function<double(const Vector&)>& f, const Vector& lo,
                     const Vector& hi, double abs_tol = kQuadratureTolerance);

/// Fixed 8-point Gauss-Legendre rule on [a, b]; R is the (evaluated) result type.
template <typename R = double, typename F>
R gauss_legendre8(F&& f, double a, double b) {
  static constexpr double nodes[4] = {0.1834346424956498, 0.5255324099163290,
                                      0.7966664774136267, 0.9602898564975363};
  static constexpr double weights[4] = {0.3626837833783620, 0.3137066458778873,
                                        0.2223810344533745, 0.1012285362903763};
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  R sum = f(mid - half * nodes[0]);
  sum += f(mid + half * nodes[0]);
  sum *= weights[0] * half;
  for (int i = 1; i < 4; ++i) {
    R pair = f(mid - half * nodes[i]);
    pair += f(mid + half * nodes[i]);
    sum += (weights[i] * half) * pair;
  }
  return sum;
}

}  // namespace lentp

#endif  // LENTP_QUADRATURE_HPP
