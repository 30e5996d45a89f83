#ifndef LENTP_TESTS_SUPPORT_HPP
#define LENTP_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "lentp/configuration.hpp"
#include "lentp/intensity.hpp"
#include "lentp/random.hpp"

namespace lentp::testing {

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v(i++) = x;
  return v;
}

/// Uniform intensity on [-1, 1]^d with total mass `rate`; its mean is zero
/// up to quadrature rounding.
inline IntensityModel centred_box(int d, double rate, double horizon = 1.0) {
  const Vector lo = Vector::Constant(d, -1.0);
  const Vector hi = Vector::Constant(d, 1.0);
  const double level = rate / std::pow(2.0, d);
  return compound_poisson(horizon, lo, hi, [level](const Vector&) { return level; }, level);
}

/// Configuration with `n` atoms at distinct uniform times and marks drawn
/// uniformly from [lo, hi]^d.
inline Configuration random_configuration(Rng& rng, int d, std::size_t n, double lo, double hi,
                                          double horizon = 1.0) {
  std::vector<Atom> atoms;
  for (std::size_t i = 0; i < n; ++i) {
    Vector x(d);
    for (int k = 0; k < d; ++k) x(k) = lo + (hi - lo) * rng.uniform();
    atoms.push_back(Atom{horizon * rng.uniform_open(), x});
  }
  return Configuration::from_unsorted(horizon, d, std::move(atoms));
}

inline double relative_frobenius(const Matrix& a, const Matrix& b) {
  const double scale = std::max(a.norm(), b.norm());
  return scale == 0.0 ? 0.0 : (a - b).norm() / scale;
}

}  // namespace lentp::testing

#endif  // LENTP_TESTS_SUPPORT_HPP
