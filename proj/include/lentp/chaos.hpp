#ifndef LENTP_CHAOS_HPP
#define LENTP_CHAOS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "lentp/configuration.hpp"
#include "lentp/functional.hpp"
#include "lentp/gamma_spec.hpp"
#include "lentp/report.hpp"

namespace lentp {

inline constexpr int kMaxChaosDegree = 8;

/// e_0..e_kmax of the entries of `values` by the one-pass recurrence
/// e_k <- e_k + v e_{k-1}, k descending.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> elementary_symmetric(
    const Eigen::MatrixBase<Derived>& values, int kmax) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> e = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(kmax + 1);
  e(0) = Scalar(1);
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    const Eigen::Index top = std::min<Eigen::Index>(kmax, i + 1);
    for (Eigen::Index k = top; k >= 1; --k) e(k) += values(i) * e(k - 1);
  }
  return e;
}

/// u evaluated at every mark of cfg.
Vector mark_values(const Configuration& cfg, const MarkFn& u);

/// N^{(k)}(u^{(x)k}) = k! e_k(u(x_1), ..., u(x_N)).
double factorial_measure(const Configuration& cfg, const MarkFn& u, int k);

/// u_1 (x) ... (x) u_n with n <= 8.
struct ProductKernel {
  std::vector<MarkFunction> factors;

  explicit ProductKernel(std::vector<MarkFunction> factors);
  static ProductKernel power(const MarkFunction& u, int n);

  int degree() const { return static_cast<int>(factors.size()); }
  /// All factors are the same callable object.
  bool equal_factors() const { return equal_; }

 private:
  bool equal_ = false;
};

/// nu(u_j) = T sigma(u_j) for each factor.
std::vector<double> kernel_means(const IntensityModel& model, const ProductKernel& kernel);

/// I_n of the symmetrised kernel by inclusion-exclusion over factorial measures.
double multiple_integral(const Configuration& cfg, const ProductKernel& kernel,
                         const std::vector<double>& nus);
double multiple_integral(const Configuration& cfg, const IntensityModel& model,
                         const ProductKernel& kernel);

/// I_n(u^{(x)n}) = sum_k C(n,k) (-nu(u))^{n-k} k! e_k from precomputed u-values.
double multiple_integral_power(const Vector& u_values, double nu_u, int n);
/// I_0..I_nmax of u^{(x)n} in one pass.
Vector multiple_integral_powers(const Vector& u_values, double nu_u, int nmax);

struct SeriesCheck {
  double residual = 0.0;
  double bound = 0.0;
  /// Constant C in bound = (t sup|u|)^{n_max+1} C.
  double constant = 0.0;
};

/// |prod(1 + t u(x_i)) e^{-t nu(u)} - sum_{n<=n_max} t^n/n! I_n(u^{(x)n})|.
SeriesCheck exp_series_check(const Configuration& cfg, const IntensityModel& model,
                             const MarkFunction& u, double t, int n_max);
SeriesCheck exp_series_check(const Configuration& cfg, const MarkFunction& u, double nu_u,
                             double t, int n_max);

/// Monte Carlo of E[I_m(u^{(x)m}) I_n(v^{(x)n})] against delta_mn n! (T sigma(uv))^n.
EstimatorReport orthogonality_mc(const IntensityModel& model, const MarkFunction& u,
                                 const MarkFunction& v, int mdeg, int ndeg,
                                 std::size_t nsamples, std::uint64_t seed, int jobs = 1);

/// Gamma[I_i u^{(x)i}, I_j v^{(x)j}] from the closed chaos expansion on the full configuration.
double chaos_gamma_closed(const Configuration& cfg, const MarkFunction& u, double nu_u,
                          const MarkFunction& v, double nu_v, int i, int j,
                          const GammaSpec& spec);
double chaos_gamma_closed(const Configuration& cfg, const IntensityModel& model,
                          const MarkFunction& u, const MarkFunction& v, int i, int j,
                          const GammaSpec& spec);

/// cfg -> I_n(u^{(x)n}); the closed derivative is n I_{n-1} grad u on the background.
Functional make_multiple_integral(const IntensityModel& model, const MarkFunction& u, int n);

/// Relative residual of the generating-function product identity.
double product_formula_check(const Configuration& cfg, const IntensityModel& model,
                             const MarkFunction& u, const MarkFunction& v, double s, double t);

// Keep-or-resample semigroup on the mark space: each atom survives with
// probability e^{-t}, otherwise it is redrawn from sigma / lambda (and its
// time from the uniform law on [0, T]).
struct ResamplingSemigroup {
  IntensityModel model;

  double keep_prob(double t) const;
};

/// p_t u = e^{-t} u + (1 - e^{-t}) sigma(u) / lambda.
MarkFn pt_apply(const ResamplingSemigroup& sg, const MarkFn& u, double t);

/// Atom-wise Mehler move of cfg.
Configuration mehler_move(const ResamplingSemigroup& sg, const Configuration& cfg, double t,
                          Rng& rng);

/// Inner Monte Carlo mean of F over Mehler moves of cfg.
MeanSe mehler_apply(const ResamplingSemigroup& sg,
                    const std::function<double(const Configuration&)>& f,
                    const Configuration& cfg, double t, std::size_t n_inner,
                    std::uint64_t seed);

/// Debiased estimate of E[(P_t I_n(u) - I_n(p_t u))^2]: the two halves of
/// the inner sample give independent errors whose product has that mean.
EstimatorReport second_quantization_check(const ResamplingSemigroup& sg, const MarkFunction& u,
                                          int n, double t, std::size_t nsamples,
                                          std::size_t n_inner, std::uint64_t seed,
                                          int jobs = 1);

/// Mehler mean of e^{N log(1+g)} against e^{N log(1 + p_t g)}, averaged over outer samples.
EstimatorReport mehler_exponential_check(const ResamplingSemigroup& sg, const MarkFunction& g,
                                         double t, std::size_t nsamples, std::size_t n_inner,
                                         std::uint64_t seed, int jobs = 1);

}  // namespace lentp

#endif  // LENTP_CHAOS_HPP
