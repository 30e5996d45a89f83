#ifndef LENTP_DIAGNOSTICS_HPP
#define LENTP_DIAGNOSTICS_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <utility>
#include <vector>

#include "lentp/configuration.hpp"
#include "lentp/functional.hpp"
#include "lentp/report.hpp"

namespace lentp {

/// Monte Carlo of E exp(i Ntilde(f)) against exp(-nu(1 - e^{if} + if)).
EstimatorReport laplace_check(const IntensityModel& model, const MarkFn& f, std::size_t nsamples,
                              std::uint64_t seed, int jobs = 1);

/// Both halves of the creation/annihilation duality for H(w, x) = G(w) g(x):
/// E int eps+H dnu = E int H dN and E int eps-H dN = E int H dnu.
std::pair<EstimatorReport, EstimatorReport> duality_check(
    const IntensityModel& model, const std::function<double(const Configuration&)>& g_of_config,
    const MarkFn& g, std::size_t nsamples, std::uint64_t seed, int jobs = 1);

/// F(w, x, r) on configurations with uniform auxiliary marks r, together
/// with its closed rho-moments.
struct MarkedIntegrand {
  std::function<double(const Configuration&, const Atom&, double)> value;
  std::function<double(const Configuration&, const Atom&)> rho_mean;    // int F drho
  std::function<double(const Configuration&, const Atom&)> rho_square;  // int F^2 drho
};

/// Second moment of int F dN.rho against its expression through rho-moments.
EstimatorReport marked_moment_check(const IntensityModel& model, const MarkedIntegrand& f,
                                    std::size_t nsamples, std::uint64_t seed, int jobs = 1);

/// Mark-expectation identities for 0 < F <= 1: the exponential of the log
/// integral and the plain integral, each against its rho-averaged form.
std::pair<EstimatorReport, EstimatorReport> mark_identities_check(const IntensityModel& model,
                                                                  const MarkedIntegrand& f,
                                                                  std::size_t nsamples,
                                                                  std::size_t n_inner,
                                                                  std::uint64_t seed,
                                                                  int jobs = 1);

/// Samples of F over independent configurations.
std::vector<Vector> sample_functional(const Functional& f, const IntensityModel& model,
                                      std::size_t nsamples, std::uint64_t seed, int jobs = 1);

// Gaussian kernel density estimate on a regular grid (one or two
// dimensions). density(i, j) is the value at (grid_x[i], grid_y[j]); in one
// dimension grid_y is empty and density has one column.
struct KdeResult {
  int dim = 1;
  std::vector<double> grid_x;
  std::vector<double> grid_y;
  Matrix density;
  Vector bandwidth;
  bool degenerate = false;
  Vector atom;  // the common value when degenerate
  double integral = 0.0;
};

/// Silverman bandwidth sigma (4 / (3n))^{1/5} in one dimension, sigma_i n^{-1/6} in two.
double silverman_bandwidth(const std::vector<double>& xs, int dim = 1);

KdeResult kde(const std::vector<Vector>& samples, double bandwidth_override = 0.0);
KdeResult kde(const Functional& f, const IntensityModel& model, std::size_t nsamples,
              std::uint64_t seed, double bandwidth_override = 0.0, int jobs = 1);

/// Kernel estimate at a single point of a one-dimensional sample.
double kde_at(const std::vector<double>& xs, double bandwidth, double x);

void write_kde_csv(std::ostream& out, const KdeResult& k);

struct EcfCurve {
  std::vector<double> u;
  std::vector<double> modulus;
  std::vector<double> se;
};

/// |mean exp(i u F)| with the band 1/sqrt(n).
EcfCurve ecf(const Functional& f, const IntensityModel& model, std::size_t nsamples,
             const std::vector<double>& u_grid, std::uint64_t seed, int jobs = 1);
EcfCurve ecf(const std::vector<double>& values, const std::vector<double>& u_grid);

/// |E exp(i u Ntilde_t(x))| = exp(-t int (1 - cos(u x)) dsigma) for d = 1.
double levy_modulus(const IntensityModel& model, double t, double u);

void write_ecf_csv(std::ostream& out, const EcfCurve& c);

struct RajchmanRow {
  int k = 0;
  double u = 0.0;
  double closed = 0.0;
  double monte_carlo = 0.0;
  double se = 0.0;
};

struct RajchmanDemo {
  /// exp(-sum_{j>=0} (1 - cos(pi / 2^j))).
  double limit = 0.0;
  std::vector<RajchmanRow> rows;
};

/// Dyadic atoms 2^{-n}, n = 0..n_max, T = 1; F = Ntilde(x) at u = 2^k pi.
RajchmanDemo rajchman_demo(int n_max, int k_max, std::size_t nsamples, std::uint64_t seed,
                           int jobs = 1);

struct LadderRow {
  double epsilon = 0.0;
  double u = 0.0;
  double modulus = 0.0;
};

struct TruncationLadder {
  std::vector<LadderRow> rows;
  /// Modulus is nonincreasing in the truncation level at every u.
  bool monotone = true;
};

/// Closed ECF of the symmetric power model at each truncation level.
TruncationLadder ecf_truncation_ladder(double c, double a, const std::vector<double>& epsilons,
                                       const std::vector<double>& u_grid, double t = 1.0);

/// The fixed battery of 40 statistical checks.
std::vector<EstimatorReport> statistical_suite(std::size_t nsamples, std::uint64_t seed,
                                               int jobs = 1);

}  // namespace lentp

#endif  // LENTP_DIAGNOSTICS_HPP
