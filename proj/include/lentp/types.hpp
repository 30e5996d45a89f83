#ifndef LENTP_TYPES_HPP
#define LENTP_TYPES_HPP

#include <Eigen/Dense>

#include <functional>
#include <limits>
#include <stdexcept>
#include <string>

namespace lentp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorKind {
  InvalidModel,
  DimensionMismatch,
  Domain,
  Quadrature,
  Unsupported,
  Parse,
  Registry,
  Io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// f(x) on the mark space.
using MarkFn = std::function<double(const Vector&)>;
/// Gradient of a mark function.
using GradFn = std::function<Vector(const Vector&)>;
/// f(t, x) on time x mark space.
using AtomFn = std::function<double(double, const Vector&)>;

/// A scalar mark function with optional gradient and sup-norm bound.
struct MarkFunction {
  MarkFn value;
  GradFn gradient;
  double sup_bound = std::numeric_limits<double>::infinity();

  double operator()(const Vector& x) const { return value(x); }
};

/// A C^1 map R^n -> R with its gradient.
struct SmoothMap {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

}  // namespace lentp

#endif  // LENTP_TYPES_HPP
