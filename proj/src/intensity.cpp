#include "lentp/intensity.hpp"

#include <cmath>
#include <memory>
#include <numbers>
#include <sstream>

#include "lentp/quadrature.hpp"

namespace lentp {

std::string to_string(Family family) {
  switch (family) {
    case Family::CompoundPoisson: return "compound-poisson";
    case Family::PowerTruncated: return "power-truncated";
    case Family::Polar: return "polar";
    case Family::CurveImage: return "curve-image";
    case Family::AtomicDyadic: return "atomic-dyadic";
    case Family::Custom: return "custom";
  }
  return "custom";
}

IntensityModel::IntensityModel(double horizon, int dim, Family family, double epsilon,
                               std::vector<IntensityComponent> components, bool diffuse,
                               std::string label)
    : horizon_(horizon),
      dim_(dim),
      family_(family),
      epsilon_(epsilon),
      components_(std::move(components)),
      diffuse_(diffuse),
      label_(label.empty() ? to_string(family) : std::move(label)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw Error(ErrorKind::InvalidModel, "intensity model: horizon must be positive");
  }
  if (dim_ < 1) throw Error(ErrorKind::InvalidModel, "intensity model: dim must be >= 1");
  if (epsilon_ < 0.0) throw Error(ErrorKind::InvalidModel, "intensity model: epsilon < 0");
  for (const auto& c : components_) {
    if (!(c.rate > 0.0) || !std::isfinite(c.rate)) {
      throw Error(ErrorKind::InvalidModel, "intensity model: component rate must be in (0, inf)");
    }
    rate_ += c.rate;
  }
  if (!(rate_ > 0.0)) throw Error(ErrorKind::InvalidModel, "intensity model: zero rate");
  mean_.resize(dim_);
  for (int i = 0; i < dim_; ++i) {
    mean_(i) = sigma_integrate([i](const Vector& x) { return x(i); });
  }
}

Vector IntensityModel::sample_mark(Rng& rng) const {
  if (components_.size() == 1) return components_.front().sample(rng);
  double u = rng.uniform() * rate_;
  for (const auto& c : components_) {
    if (u < c.rate) return c.sample(rng);
    u -= c.rate;
  }
  return components_.back().sample(rng);
}

double IntensityModel::sigma_integrate(const MarkFn& f) const {
  double total = 0.0;
  for (const auto& c : components_) total += c.integrate(f);
  return total;
}

double IntensityModel::nu_integrate(const AtomFn& f) const {
  return gauss_kronrod(
             [&](double t) {
               return sigma_integrate([&](const Vector& x) { return f(t, x); });
             },
             0.0, horizon_)
      .value;
}

IntensityModel compound_poisson(double horizon, const Vector& lo, const Vector& hi,
                                MarkFn density, double density_bound) {
  if (lo.size() != hi.size() || lo.size() == 0 || ((hi - lo).array() <= 0.0).any()) {
    throw Error(ErrorKind::InvalidModel, "compound_poisson: empty support box");
  }
  if (!(density_bound > 0.0)) {
    throw Error(ErrorKind::InvalidModel, "compound_poisson: density bound must be positive");
  }
  auto h = std::make_shared<MarkFn>(std::move(density));
  const double rate = integrate_box(*h, lo, hi);
  IntensityComponent comp;
  comp.rate = rate;
  comp.sample = [h, lo, hi, density_bound](Rng& rng) {
    Vector x(lo.size());
    for (int attempt = 0; attempt < 1000000; ++attempt) {
      for (Eigen::Index i = 0; i < lo.size(); ++i) x(i) = lo(i) + (hi(i) - lo(i)) * rng.uniform_open();
      const double value = (*h)(x);
      if (value > density_bound) {
        throw Error(ErrorKind::InvalidModel, "compound_poisson: density exceeds its bound");
      }
      if (rng.uniform() * density_bound < value) return x;
    }
    throw Error(ErrorKind::InvalidModel, "compound_poisson: rejection sampler stalled");
  };
  comp.integrate = [h, lo, hi](const MarkFn& f) {
    return integrate_box([&](const Vector& x) { return f(x) * (*h)(x); }, lo, hi);
  };
  return IntensityModel(horizon, static_cast<int>(lo.size()), Family::CompoundPoisson, 0.0,
                        {comp}, true, "compound-poisson");
}

namespace {

// One side of c x^{-1-a} on (eps, 1), integrated in s = log x so the
// integrand c x^{-a} f(x) stays smooth near the truncation point.
IntensityComponent power_side(double c, double a, double epsilon, double sign) {
  IntensityComponent comp;
  const double log_eps = std::log(epsilon);
  comp.rate = (a == 0.0) ? -c * log_eps : c * (std::pow(epsilon, -a) - 1.0) / a;
  comp.sample = [a, epsilon, sign, log_eps](Rng& rng) {
    const double u = rng.uniform_open();
    double x;
    if (a == 0.0) {
      x = std::exp(log_eps * (1.0 - u));
    } else {
      // inverse CDF of x^{-1-a} on (eps, 1)
      const double lo = std::pow(epsilon, -a);
      x = std::pow(lo - u * (lo - 1.0), -1.0 / a);
    }
    Vector v(1);
    v(0) = sign * std::min(std::max(x, epsilon), 1.0);
    return v;
  };
  comp.integrate = [c, a, sign, log_eps](const MarkFn& f) {
    Vector v(1);
    return gauss_kronrod(
               [&](double s) {
                 const double x = std::exp(s);
                 v(0) = sign * x;
                 return c * std::exp(-a * s) * f(v);
               },
               log_eps, 0.0)
        .value;
  };
  return comp;
}

}  // namespace

IntensityModel power_truncated(double horizon, double c, double a, double epsilon,
                               bool symmetric) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidModel, "power_truncated: epsilon must lie in (0, 1)");
  }
  if (!(c > 0.0)) throw Error(ErrorKind::InvalidModel, "power_truncated: c must be positive");
  std::vector<IntensityComponent> comps{power_side(c, a, epsilon, 1.0)};
  if (symmetric) comps.push_back(power_side(c, a, epsilon, -1.0));
  return IntensityModel(horizon, 1, Family::PowerTruncated, epsilon, std::move(comps), true,
                        symmetric ? "power-symmetric" : "power-one-sided");
}

IntensityModel polar(double horizon, double epsilon, std::function<double(double)> angular,
                     double angular_bound) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw Error(ErrorKind::InvalidModel, "polar: epsilon must lie in (0, 1)");
  }
  const bool uniform = !angular;
  auto g = std::make_shared<std::function<double(double)>>(
      uniform ? std::function<double(double)>([](double) { return 1.0; }) : std::move(angular));
  const double two_pi = 2.0 * std::numbers::pi;
  const double log_eps = std::log(epsilon);
  const double angular_mass =
      uniform ? two_pi : gauss_kronrod([&](double th) { return (*g)(th); }, 0.0, two_pi).value;
  IntensityComponent comp;
  comp.rate = angular_mass * (-log_eps);
  comp.sample = [g, uniform, angular_bound, log_eps, two_pi](Rng& rng) {
    const double rho = std::exp(log_eps * (1.0 - rng.uniform_open()));
    double theta = two_pi * rng.uniform();
    if (!uniform) {
      for (int attempt = 0;; ++attempt) {
        if (attempt > 1000000) throw Error(ErrorKind::InvalidModel, "polar: sampler stalled");
        const double value = (*g)(theta);
        if (value > angular_bound) {
          throw Error(ErrorKind::InvalidModel, "polar: angular density exceeds its bound");
        }
        if (rng.uniform() * angular_bound < value) break;
        theta = two_pi * rng.uniform();
      }
    }
    Vector x(2);
    x << rho * std::cos(theta), rho * std::sin(theta);
    return x;
  };
  comp.integrate = [g, log_eps, two_pi](const MarkFn& f) {
    Vector x(2);
    return gauss_kronrod(
               [&](double th) {
                 const double weight = (*g)(th);
                 if (weight == 0.0) return 0.0;
                 const double ct = std::cos(th), st = std::sin(th);
                 return weight * gauss_kronrod(
                                     [&](double s) {
                                       const double rho = std::exp(s);
                                       x << rho * ct, rho * st;
                                       return f(x);
                                     },
                                     log_eps, 0.0, kQuadratureTolerance * 0.01)
                                     .value;
               },
               0.0, two_pi)
        .value;
  };
  return IntensityModel(horizon, 2, Family::Polar, epsilon, {comp}, true, "polar");
}

IntensityModel curve_image(const IntensityModel& base, std::function<Vector(double)> curve,
                           int dim) {
  if (base.dim() != 1) {
    throw Error(ErrorKind::DimensionMismatch, "curve_image: base model must be one-dimensional");
  }
  auto phi = std::make_shared<std::function<Vector(double)>>(std::move(curve));
  std::vector<IntensityComponent> comps;
  for (const auto& bc : base.components()) {
    IntensityComponent comp;
    comp.rate = bc.rate;
    auto base_sample = bc.sample;
    auto base_integrate = bc.integrate;
    comp.sample = [phi, base_sample](Rng& rng) { return (*phi)(base_sample(rng)(0)); };
    comp.integrate = [phi, base_integrate](const MarkFn& f) {
      return base_integrate([&](const Vector& u) { return f((*phi)(u(0))); });
    };
    comps.push_back(std::move(comp));
  }
  return IntensityModel(base.horizon(), dim, Family::CurveImage, base.epsilon(),
                        std::move(comps), base.diffuse(), "curve-image");
}

IntensityModel atomic_dyadic(double horizon, int n_max, int n_start) {
  if (n_max < n_start) throw Error(ErrorKind::InvalidModel, "atomic_dyadic: n_max < n_start");
  const int count = n_max - n_start + 1;
  IntensityComponent comp;
  comp.rate = static_cast<double>(count);
  comp.sample = [n_start, count](Rng& rng) {
    const int n = n_start + static_cast<int>(rng.uniform() * count);
    Vector x(1);
    x(0) = std::ldexp(1.0, -std::min(n, n_start + count - 1));
    return x;
  };
  comp.integrate = [n_start, n_max](const MarkFn& f) {
    Vector x(1);
    double total = 0.0;
    for (int n = n_start; n <= n_max; ++n) {
      x(0) = std::ldexp(1.0, -n);
      total += f(x);
    }
    return total;
  };
  return IntensityModel(horizon, 1, Family::AtomicDyadic, 0.0, {comp}, false, "atomic-dyadic");
}

IntensityModel superpose(const std::vector<IntensityModel>& models) {
  if (models.empty()) throw Error(ErrorKind::InvalidModel, "superpose: no models");
  std::vector<IntensityComponent> comps;
  bool diffuse = true;
  double epsilon = models.front().epsilon();
  for (const auto& m : models) {
    if (m.dim() != models.front().dim() || m.horizon() != models.front().horizon()) {
      throw Error(ErrorKind::DimensionMismatch, "superpose: horizon or dimension differ");
    }
    comps.insert(comps.end(), m.components().begin(), m.components().end());
    diffuse = diffuse && m.diffuse();
    epsilon = std::min(epsilon, m.epsilon());
  }
  const Family family = models.size() == 1 ? models.front().family() : Family::Custom;
  return IntensityModel(models.front().horizon(), models.front().dim(), family, epsilon,
                        std::move(comps), diffuse, "superposition");
}

IntensityModel scale_intensity(const IntensityModel& model, double factor) {
  if (!(factor > 0.0)) throw Error(ErrorKind::InvalidModel, "scale_intensity: factor must be positive");
  std::vector<IntensityComponent> comps;
  for (const auto& c : model.components()) {
    IntensityComponent s = c;
    s.rate = c.rate * factor;
    auto inner = c.integrate;
    s.integrate = [inner, factor](const MarkFn& f) { return factor * inner(f); };
    comps.push_back(std::move(s));
  }
  return IntensityModel(model.horizon(), model.dim(), model.family(), model.epsilon(),
                        std::move(comps), model.diffuse(), model.label());
}

IntensityModel with_expected_count(const IntensityModel& model, double expected_count) {
  return scale_intensity(model, expected_count / (model.rate() * model.horizon()));
}

}  // namespace lentp
