#include "lentp/chaos.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "lentp/parallel.hpp"

namespace lentp {
namespace {

constexpr std::uint64_t kOrthogonalityTag = 0x6f7274;
constexpr std::uint64_t kOuterTag = 0x6f75746572;
constexpr std::uint64_t kInnerTag = 0x696e6e6572;
constexpr std::uint64_t kMehlerTag = 0x6d65686c;

double factorial(int n) {
  double out = 1.0;
  for (int k = 2; k <= n; ++k) out *= k;
  return out;
}

double binomial(int n, int k) {
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

void check_degree(int n, int cap, const char* who) {
  if (n < 0) throw Error(ErrorKind::Domain, std::string(who) + ": negative degree");
  if (n > cap) throw Error(ErrorKind::Unsupported, std::string(who) + ": degree above cap");
}

double sup_bound(const MarkFunction& u) {
  if (!std::isfinite(u.sup_bound)) {
    throw Error(ErrorKind::Domain, "kernel factor needs a finite sup bound");
  }
  return u.sup_bound;
}

}  // namespace

Vector mark_values(const Configuration& cfg, const MarkFn& u) {
  Vector out(static_cast<Eigen::Index>(cfg.size()));
  for (std::size_t i = 0; i < cfg.size(); ++i) out(static_cast<Eigen::Index>(i)) = u(cfg[i].mark);
  return out;
}

double factorial_measure(const Configuration& cfg, const MarkFn& u, int k) {
  if (k < 0) throw Error(ErrorKind::Domain, "factorial_measure: k >= 0");
  if (static_cast<std::size_t>(k) > cfg.size()) return 0.0;
  return factorial(k) * elementary_symmetric(mark_values(cfg, u), k)(k);
}

ProductKernel::ProductKernel(std::vector<MarkFunction> fs) : factors(std::move(fs)) {
  check_degree(degree(), kMaxChaosDegree, "ProductKernel");
}

ProductKernel ProductKernel::power(const MarkFunction& u, int n) {
  ProductKernel k(std::vector<MarkFunction>(static_cast<std::size_t>(std::max(n, 0)), u));
  k.equal_ = true;
  return k;
}

std::vector<double> kernel_means(const IntensityModel& model, const ProductKernel& kernel) {
  std::vector<double> out;
  out.reserve(kernel.factors.size());
  if (kernel.equal_factors() && !kernel.factors.empty()) {
    out.assign(kernel.factors.size(),
               model.horizon() * model.sigma_integrate(kernel.factors.front().value));
    return out;
  }
  for (const auto& u : kernel.factors) out.push_back(model.horizon() * model.sigma_integrate(u.value));
  return out;
}

Vector multiple_integral_powers(const Vector& u_values, double nu_u, int nmax) {
  const Vector e = elementary_symmetric(u_values, nmax);
  Vector out = Vector::Zero(nmax + 1);
  for (int n = 0; n <= nmax; ++n) {
    double total = 0.0;
    double fact_k = 1.0;
    for (int k = 0; k <= n; ++k) {
      if (k > 0) fact_k *= k;
      total += binomial(n, k) * std::pow(-nu_u, n - k) * fact_k * e(k);
    }
    out(n) = total;
  }
  return out;
}

double multiple_integral_power(const Vector& u_values, double nu_u, int n) {
  check_degree(n, kMaxChaosDegree, "multiple_integral_power");
  return multiple_integral_powers(u_values, nu_u, n)(n);
}

double multiple_integral(const Configuration& cfg, const ProductKernel& kernel,
                         const std::vector<double>& nus) {
  const int n = kernel.degree();
  if (nus.size() != kernel.factors.size()) {
    throw Error(ErrorKind::DimensionMismatch, "multiple_integral: one mean per factor");
  }
  if (kernel.equal_factors() && n > 0) {
    return multiple_integral_power(mark_values(cfg, kernel.factors.front().value), nus.front(), n);
  }
  const std::size_t subsets = std::size_t{1} << n;
  // A[B] = N(prod_{j in B} u_j)
  std::vector<double> a(subsets, 0.0);
  std::vector<double> prod(subsets);
  for (const auto& atom : cfg) {
    prod[0] = 1.0;
    for (std::size_t mask = 1; mask < subsets; ++mask) {
      const int low = std::countr_zero(mask);
      prod[mask] = prod[mask & (mask - 1)] * kernel.factors[low](atom.mark);
      a[mask] += prod[mask];
    }
  }
  // Factorial measures N^{(S)} by splitting off the block containing min S.
  std::vector<double> nf(subsets, 0.0);
  nf[0] = 1.0;
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    const std::size_t low = mask & (~mask + 1);
    const std::size_t rest = mask ^ low;
    double total = 0.0;
    for (std::size_t sub = rest;; sub = (sub - 1) & rest) {
      const std::size_t block = sub | low;
      const int size = std::popcount(block);
      const double sign = (size % 2 == 1) ? 1.0 : -1.0;
      total += sign * factorial(size - 1) * a[block] * nf[mask ^ block];
      if (sub == 0) break;
    }
    nf[mask] = total;
  }
  double out = 0.0;
  for (std::size_t mask = 0; mask < subsets; ++mask) {
    double weight = ((n - std::popcount(mask)) % 2 == 0) ? 1.0 : -1.0;
    for (int j = 0; j < n; ++j) {
      if (!(mask & (std::size_t{1} << j))) weight *= nus[static_cast<std::size_t>(j)];
    }
    out += weight * nf[mask];
  }
  return out;
}

double multiple_integral(const Configuration& cfg, const IntensityModel& model,
                         const ProductKernel& kernel) {
  return multiple_integral(cfg, kernel, kernel_means(model, kernel));
}

SeriesCheck exp_series_check(const Configuration& cfg, const MarkFunction& u, double nu_u,
                             double t, int n_max) {
  const double s = sup_bound(u);
  if (!(std::abs(t) * s < 0.5)) {
    throw Error(ErrorKind::Domain, "exp_series_check: |t| sup|u| must be below 1/2");
  }
  if (n_max < 0) throw Error(ErrorKind::Domain, "exp_series_check: n_max >= 0");
  const Vector values = mark_values(cfg, u.value);
  double lhs = std::exp(-t * nu_u);
  for (Eigen::Index i = 0; i < values.size(); ++i) lhs *= 1.0 + t * values(i);
  const Vector integrals = multiple_integral_powers(values, nu_u, n_max);
  double rhs = 0.0;
  double coef = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) coef *= t / n;
    rhs += coef * integrals(n);
  }
  SeriesCheck out;
  out.residual = std::abs(lhs - rhs);
  // Cauchy estimate on |z| = 1 / (2 sup|u|), where |1 + z u| <= 3/2.
  const double ts = std::abs(t) * s;
  if (s == 0.0) {
    out.constant = std::exp(0.0);
    out.bound = 0.0;
    return out;
  }
  out.constant = std::pow(1.5, static_cast<double>(cfg.size())) *
                 std::exp(std::abs(nu_u) / (2.0 * s)) / (1.0 - 2.0 * ts);
  out.bound = std::pow(2.0 * ts, n_max + 1) * out.constant;
  return out;
}

SeriesCheck exp_series_check(const Configuration& cfg, const IntensityModel& model,
                             const MarkFunction& u, double t, int n_max) {
  return exp_series_check(cfg, u, model.horizon() * model.sigma_integrate(u.value), t, n_max);
}

EstimatorReport orthogonality_mc(const IntensityModel& model, const MarkFunction& u,
                                 const MarkFunction& v, int mdeg, int ndeg,
                                 std::size_t nsamples, std::uint64_t seed, int jobs) {
  check_degree(mdeg, kMaxChaosDegree, "orthogonality_mc");
  check_degree(ndeg, kMaxChaosDegree, "orthogonality_mc");
  const double horizon = model.horizon();
  const double nu_u = horizon * model.sigma_integrate(u.value);
  const double nu_v = horizon * model.sigma_integrate(v.value);
  const auto draws = parallel_map<double>(nsamples, jobs, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, kOrthogonalityTag, i);
    const Configuration cfg = sample_configuration(model, rng);
    return multiple_integral_power(mark_values(cfg, u.value), nu_u, mdeg) *
           multiple_integral_power(mark_values(cfg, v.value), nu_v, ndeg);
  });
  double reference = 0.0;
  if (mdeg == ndeg) {
    const double inner =
        horizon * model.sigma_integrate([&](const Vector& x) { return u(x) * v(x); });
    reference = factorial(ndeg) * std::pow(inner, ndeg);
  }
  const MeanSe stats = mean_se(draws);
  return statistical_report("orthogonality(" + std::to_string(mdeg) + "," +
                                std::to_string(ndeg) + ")",
                            stats.mean, reference, stats.se, stats.n);
}

double chaos_gamma_closed(const Configuration& cfg, const MarkFunction& u, double nu_u,
                          const MarkFunction& v, double nu_v, int i, int j,
                          const GammaSpec& spec) {
  check_degree(i, kMaxChaosDegree, "chaos_gamma_closed");
  check_degree(j, kMaxChaosDegree, "chaos_gamma_closed");
  if (i == 0 || j == 0 || cfg.empty()) return 0.0;
  if (!u.gradient || !v.gradient) {
    throw Error(ErrorKind::Domain, "chaos_gamma_closed: kernels need gradients");
  }
  const Vector iu = multiple_integral_powers(mark_values(cfg, u.value), nu_u, i - 1);
  const Vector iv = multiple_integral_powers(mark_values(cfg, v.value), nu_v, j - 1);
  // n! sum_{k=1}^{n} (-w)^{k-1} I_{n-k} / (n-k)!
  auto weight = [](const Vector& integrals, int n, double w) {
    double total = 0.0;
    double power = 1.0;
    for (int k = 1; k <= n; ++k) {
      total += power * integrals(n - k) / factorial(n - k);
      power *= -w;
    }
    return factorial(n) * total;
  };
  double out = 0.0;
  for (const auto& a : cfg) {
    const double gamma = gamma_quadratic(spec, a.mark, u.gradient(a.mark), v.gradient(a.mark));
    out += weight(iu, i, u(a.mark)) * weight(iv, j, v(a.mark)) * gamma;
  }
  return out;
}

double chaos_gamma_closed(const Configuration& cfg, const IntensityModel& model,
                          const MarkFunction& u, const MarkFunction& v, int i, int j,
                          const GammaSpec& spec) {
  const double horizon = model.horizon();
  return chaos_gamma_closed(cfg, u, horizon * model.sigma_integrate(u.value), v,
                            horizon * model.sigma_integrate(v.value), i, j, spec);
}

Functional make_multiple_integral(const IntensityModel& model, const MarkFunction& u, int n) {
  check_degree(n, kMaxChaosDegree, "make_multiple_integral");
  const double nu_u = model.horizon() * model.sigma_integrate(u.value);
  Functional f;
  f.out_dim = 1;
  f.mark_dim = model.dim();
  f.label = "multiple_integral_" + std::to_string(n);
  f.value = [u, nu_u, n](const Configuration& cfg) {
    Vector out(1);
    out(0) = multiple_integral_power(mark_values(cfg, u.value), nu_u, n);
    return out;
  };
  if (u.gradient) {
    f.has_closed_derivative = true;
    f.add_derivative = [u, nu_u, n](const Configuration& cfg, double, const Vector& x) {
      if (n == 0) return Matrix(Matrix::Zero(1, x.size()));
      const double lower = multiple_integral_power(mark_values(cfg, u.value), nu_u, n - 1);
      return Matrix((n * lower) * u.gradient(x).transpose());
    };
  }
  return f;
}

double product_formula_check(const Configuration& cfg, const IntensityModel& model,
                             const MarkFunction& u, const MarkFunction& v, double s, double t) {
  if (!(std::abs(s) * sup_bound(u) < 0.5) || !(std::abs(t) * sup_bound(v) < 0.5)) {
    throw Error(ErrorKind::Domain, "product_formula_check: outside the convergence radius");
  }
  const double horizon = model.horizon();
  auto nu = [&](const MarkFn& f) { return horizon * model.sigma_integrate(f); };
  const double nu_u = nu(u.value);
  const double nu_v = nu(v.value);
  const double nu_uv = nu([&](const Vector& x) { return u(x) * v(x); });
  const double nu_w = nu([&](const Vector& x) {
    return s * u(x) + t * v(x) + s * t * u(x) * v(x);
  });
  double log_u = 0.0;
  double log_v = 0.0;
  double log_w = 0.0;
  for (const auto& a : cfg) {
    const double ua = u(a.mark);
    const double va = v(a.mark);
    log_u += std::log1p(s * ua);
    log_v += std::log1p(t * va);
    log_w += std::log1p(s * ua + t * va + s * t * ua * va);
  }
  const double lhs = std::exp(log_u - s * nu_u) * std::exp(log_v - t * nu_v);
  const double rhs = std::exp(log_w - nu_w) * std::exp(s * t * nu_uv);
  return std::abs(lhs - rhs) / std::abs(lhs);
}

double ResamplingSemigroup::keep_prob(double t) const { return std::exp(-t); }

MarkFn pt_apply(const ResamplingSemigroup& sg, const MarkFn& u, double t) {
  if (!(t >= 0.0)) throw Error(ErrorKind::Domain, "pt_apply: t >= 0");
  if (t == 0.0) return u;
  const double keep = sg.keep_prob(t);
  const double level = sg.model.sigma_integrate(u) / sg.model.rate();
  return [u, keep, level](const Vector& x) { return keep * u(x) + (1.0 - keep) * level; };
}

Configuration mehler_move(const ResamplingSemigroup& sg, const Configuration& cfg, double t,
                          Rng& rng) {
  const double keep = sg.keep_prob(t);
  if (keep >= 1.0) return cfg;
  const double horizon = cfg.horizon();
  for (;;) {
    std::vector<Atom> atoms;
    atoms.reserve(cfg.size());
    for (const auto& a : cfg) {
      if (rng.uniform() < keep) {
        atoms.push_back(a);
      } else {
        const double time = horizon * rng.uniform();
        atoms.push_back(Atom{time, sg.model.sample_mark(rng)});
      }
    }
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& x, const Atom& y) { return x.time < y.time; });
    const bool distinct =
        std::adjacent_find(atoms.begin(), atoms.end(), [](const Atom& x, const Atom& y) {
          return x.time == y.time;
        }) == atoms.end();
    if (distinct) return Configuration(horizon, cfg.dim(), std::move(atoms), cfg.intensity_ref());
  }
}

MeanSe mehler_apply(const ResamplingSemigroup& sg,
                    const std::function<double(const Configuration&)>& f,
                    const Configuration& cfg, double t, std::size_t n_inner,
                    std::uint64_t seed) {
  if (n_inner == 0) throw Error(ErrorKind::Domain, "mehler_apply: n_inner >= 1");
  std::vector<double> values(n_inner);
  for (std::size_t j = 0; j < n_inner; ++j) {
    Rng rng = Rng::stream(seed, kMehlerTag, j);
    values[j] = f(mehler_move(sg, cfg, t, rng));
  }
  return mean_se(values);
}

EstimatorReport second_quantization_check(const ResamplingSemigroup& sg, const MarkFunction& u,
                                          int n, double t, std::size_t nsamples,
                                          std::size_t n_inner, std::uint64_t seed, int jobs) {
  check_degree(n, 6, "second_quantization_check");
  if (n_inner < 2) throw Error(ErrorKind::Domain, "second_quantization_check: n_inner >= 2");
  const double nu_u = sg.model.horizon() * sg.model.sigma_integrate(u.value);
  const MarkFn moved_u = pt_apply(sg, u.value, t);
  // sigma(p_t u) = sigma(u)
  const std::size_t half = n_inner / 2;
  const auto draws = parallel_map<double>(nsamples, jobs, [&](std::size_t i) {
    Rng outer = Rng::stream(seed, kOuterTag, i);
    const Configuration cfg = sample_configuration(sg.model, outer);
    const double target = multiple_integral_power(mark_values(cfg, moved_u), nu_u, n);
    auto f = [&](const Configuration& c) {
      return multiple_integral_power(mark_values(c, u.value), nu_u, n);
    };
    const std::uint64_t inner_seed = mix64(seed ^ mix64(kInnerTag + i));
    double a = 0.0;
    double b = 0.0;
    for (std::size_t j = 0; j < 2 * half; ++j) {
      Rng rng = Rng::stream(inner_seed, kMehlerTag, j);
      const double value = f(mehler_move(sg, cfg, t, rng));
      (j < half ? a : b) += value;
    }
    a /= static_cast<double>(half);
    b /= static_cast<double>(half);
    return (a - target) * (b - target);
  });
  const MeanSe stats = mean_se(draws);
  return statistical_report("second_quantization(n=" + std::to_string(n) + ")", stats.mean, 0.0,
                            stats.se, stats.n);
}

EstimatorReport mehler_exponential_check(const ResamplingSemigroup& sg, const MarkFunction& g,
                                         double t, std::size_t nsamples, std::size_t n_inner,
                                         std::uint64_t seed, int jobs) {
  const MarkFn moved_g = pt_apply(sg, g.value, t);
  auto exp_log = [](const Configuration& c, const MarkFn& h) {
    double total = 0.0;
    for (const auto& a : c) total += std::log1p(h(a.mark));
    return std::exp(total);
  };
  const auto draws = parallel_map<double>(nsamples, jobs, [&](std::size_t i) {
    Rng outer = Rng::stream(seed, kOuterTag, i);
    const Configuration cfg = sample_configuration(sg.model, outer);
    const std::uint64_t inner_seed = mix64(seed ^ mix64(kInnerTag + i));
    const MeanSe inner = mehler_apply(
        sg, [&](const Configuration& c) { return exp_log(c, g.value); }, cfg, t, n_inner,
        inner_seed);
    return inner.mean - exp_log(cfg, moved_g);
  });
  const MeanSe stats = mean_se(draws);
  return statistical_report("mehler_exponential", stats.mean, 0.0, stats.se, stats.n);
}

}  // namespace lentp
