#ifndef LENTP_GAMMA_SPEC_HPP
#define LENTP_GAMMA_SPEC_HPP

#include <functional>
#include <string>

#include "lentp/types.hpp"

namespace lentp {

// Bottom carre du champ gamma[f](x) = grad f(x)^T alpha(x) grad f(x) on the
// mark space, with a factor L L^T = alpha and an orthonormal zero-mean basis
// eta_1..eta_k of L^2[0, 1] that realises the gradient
// f_flat(x, r) = grad f(x)^T L(x) eta(r).
struct GammaSpec {
  int dim = 1;
  std::function<Matrix(const Vector&)> alpha;
  std::function<Matrix(const Vector&)> chol;
  int basis_size = 1;
  std::string label;

  /// eta_j(r) = sqrt(2) cos(2 pi j r), j = 1..basis_size.
  static double basis(int j, double r);
  /// (eta_1(r), ..., eta_dim(r)).
  Vector basis_vector(double r) const;
};

/// Lower Cholesky factor; retries with 1e-14 * trace on the diagonal when
/// alpha is only positive semidefinite.
Matrix cholesky_with_jitter(const Matrix& alpha);

/// u^T alpha(x) v.
double gamma_quadratic(const GammaSpec& spec, const Vector& x, const Vector& u,
                       const Vector& v);

/// alpha(x) = diag(x_1^2, ..., x_d^2).
GammaSpec gamma_diag_x2(int d);
/// alpha = identity.
GammaSpec gamma_identity(int d);
/// alpha(x) = |x|^2 I.
GammaSpec gamma_polar(int d);
/// Arbitrary symmetric PSD field alpha(x).
GammaSpec gamma_general(int d, std::function<Matrix(const Vector&)> alpha,
                        std::string label = "general");
/// Push-forward of a one-dimensional gamma along a planar curve u -> x(u):
/// alpha(x) = x'(u) x'(u)^T gamma_base(u), with u = coordinate(x).
GammaSpec gamma_curve_pullback(std::function<double(const Vector&)> coordinate,
                               std::function<Vector(double)> tangent,
                               std::function<double(double)> gamma_base,
                               std::string label = "curve");
/// The parabola x = (u, u^2) with gamma_base(u) = u^2.
GammaSpec gamma_parabola();

}  // namespace lentp

#endif  // LENTP_GAMMA_SPEC_HPP
