#ifndef LENTP_INTENSITY_HPP
#define LENTP_INTENSITY_HPP

#include <functional>
#include <string>
#include <vector>

#include "lentp/random.hpp"
#include "lentp/types.hpp"

namespace lentp {

enum class Family { CompoundPoisson, PowerTruncated, Polar, CurveImage, AtomicDyadic, Custom };

std::string to_string(Family family);

/// One finite piece of a truncated Levy measure: its total mass, a sampler
/// for the normalised law and a deterministic integrator f -> \int f dsigma.
struct IntensityComponent {
  double rate = 0.0;
  std::function<Vector(Rng&)> sample;
  std::function<double(const MarkFn&)> integrate;
};

// Intensity dt x sigma_eps on [0, T] x R^d. sigma_eps is a finite sum of
// components; its total mass is the jump rate and mean() is the compensator
// vector \int x sigma_eps(dx). Immutable once built.
class IntensityModel {
 public:
  IntensityModel(double horizon, int dim, Family family, double epsilon,
                 std::vector<IntensityComponent> components, bool diffuse = true,
                 std::string label = "");

  double horizon() const { return horizon_; }
  int dim() const { return dim_; }
  Family family() const { return family_; }
  double epsilon() const { return epsilon_; }
  double rate() const { return rate_; }
  const Vector& mean() const { return mean_; }
  bool diffuse() const { return diffuse_; }
  const std::string& label() const { return label_; }
  const std::vector<IntensityComponent>& components() const { return components_; }

  /// One mark drawn from sigma_eps / rate.
  Vector sample_mark(Rng& rng) const;
  /// \int f d sigma_eps.
  double sigma_integrate(const MarkFn& f) const;
  /// \int f d nu over [0, T] x R^d; time-dependent f uses product quadrature.
  double nu_integrate(const AtomFn& f) const;

 private:
  double horizon_;
  int dim_;
  Family family_;
  double epsilon_;
  std::vector<IntensityComponent> components_;
  bool diffuse_;
  std::string label_;
  double rate_ = 0.0;
  Vector mean_;
};

/// Compound Poisson with intensity density h on the box [lo, hi]; sampling is
/// by rejection under `density_bound` >= sup h.
IntensityModel compound_poisson(double horizon, const Vector& lo, const Vector& hi,
                                MarkFn density, double density_bound);

/// c x^{-1-a} on (eps, 1); the symmetric variant adds the mirror image on (-1, -eps).
IntensityModel power_truncated(double horizon, double c, double a, double epsilon,
                               bool symmetric);

/// g(theta) dtheta 1_{(eps,1)}(rho) drho / rho in d = 2.
IntensityModel polar(double horizon, double epsilon,
                     std::function<double(double)> angular = nullptr,
                     double angular_bound = 1.0);

/// Image of a one-dimensional model under u -> curve(u).
IntensityModel curve_image(const IntensityModel& base, std::function<Vector(double)> curve,
                           int dim);

/// sum_{n=n_start}^{n_max} delta_{2^{-n}} on the mark axis (not diffuse).
IntensityModel atomic_dyadic(double horizon, int n_max, int n_start = 0);

/// Sum of independent models sharing horizon and dimension.
IntensityModel superpose(const std::vector<IntensityModel>& models);

/// Multiplies the intensity by `factor` (rate and integrals scale alike).
IntensityModel scale_intensity(const IntensityModel& model, double factor);

/// Rescales so that rate * horizon equals `expected_count`.
IntensityModel with_expected_count(const IntensityModel& model, double expected_count);

}  // namespace lentp

#endif  // LENTP_INTENSITY_HPP
