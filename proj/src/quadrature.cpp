#include "lentp/quadrature.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <sstream>
#include <vector>

namespace lentp {
namespace {

constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {0.129484966168869693270611432679082,
                           0.279705391489276667901467771423780,
                           0.381830050505118944950369775488975,
                           0.417959183673469387755102040816327};

struct Piece {
  double a, b, value, error;
  bool operator<(const Piece& other) const { return error < other.error; }
};

Piece kronrod15(const std::function<double(double)>& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * kWgk[7];
  double gauss = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * kXgk[j];
    const double s = f(c - x) + f(c + x);
    kronrod += kWgk[j] * s;
    if (j % 2 == 1) gauss += kWg[j / 2] * s;
  }
  kronrod *= h;
  gauss *= h;
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace

QuadratureResult gauss_kronrod(const std::function<double(double)>& f, double a, double b,
                               double abs_tol, int max_intervals) {
  if (a == b) return {0.0, 0.0, 0};
  double sign = 1.0;
  if (a > b) {
    std::swap(a, b);
    sign = -1.0;
  }
  std::priority_queue<Piece> heap;
  Piece first = kronrod15(f, a, b);
  if (!std::isfinite(first.value)) {
    throw Error(ErrorKind::Quadrature, "quadrature: non-finite integrand on [" +
                                           std::to_string(a) + ", " + std::to_string(b) + "]");
  }
  heap.push(first);
  double total = first.value;
  double error = first.error;
  int intervals = 1;
  const double eps = std::numeric_limits<double>::epsilon();
  while (error > abs_tol && error > 50.0 * eps * std::abs(total)) {
    if (intervals >= max_intervals) {
      std::ostringstream msg;
      msg << "quadrature: no convergence on [" << a << ", " << b << "] after " << intervals
          << " intervals (estimate " << total << ", error " << error << ")";
      throw Error(ErrorKind::Quadrature, msg.str());
    }
    Piece worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      // interval exhausted at machine resolution; accept what we have
      break;
    }
    Piece left = kronrod15(f, worst.a, mid);
    Piece right = kronrod15(f, mid, worst.b);
    if (!std::isfinite(left.value) || !std::isfinite(right.value)) {
      throw Error(ErrorKind::Quadrature, "quadrature: non-finite integrand near " +
                                             std::to_string(mid));
    }
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
    if (intervals % 256 == 0) {
      // refresh the running sums against drift
      std::priority_queue<Piece> copy = heap;
      total = 0.0;
      error = 0.0;
      while (!copy.empty()) {
        total += copy.top().value;
        error += copy.top().error;
        copy.pop();
      }
    }
  }
  return {sign * total, error, intervals};
}

namespace {

double integrate_box_from(const std::function<double(const Vector&)>& f, Vector& point,
                          const Vector& lo, const Vector& hi, int axis, double abs_tol) {
  const int d = static_cast<int>(lo.size());
  if (axis == d - 1) {
    return gauss_kronrod(
               [&](double s) {
                 point(axis) = s;
                 return f(point);
               },
               lo(axis), hi(axis), abs_tol)
        .value;
  }
  const double inner_tol = abs_tol / std::max(1.0, hi(axis) - lo(axis)) * 0.1;
  return gauss_kronrod(
             [&](double s) {
               point(axis) = s;
               return integrate_box_from(f, point, lo, hi, axis + 1, inner_tol);
             },
             lo(axis), hi(axis), abs_tol)
      .value;
}

}  // namespace

double integrate_box(const std::function<double(const Vector&)>& f, const Vector& lo,
                     const Vector& hi, double abs_tol) {
  if (lo.size() != hi.size() || lo.size() == 0) {
    throw Error(ErrorKind::DimensionMismatch, "integrate_box: bad box dimensions");
  }
  Vector point = lo;
  return integrate_box_from(f, point, lo, hi, 0, abs_tol);
}

}  // namespace lentp
