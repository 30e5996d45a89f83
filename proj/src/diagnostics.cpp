#include "lentp/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <iomanip>
#include <numbers>
#include <ostream>

#include "lentp/chaos.hpp"
#include "lentp/intensity.hpp"
#include "lentp/parallel.hpp"

namespace lentp {
namespace {

constexpr std::uint64_t kLaplaceTag = 0x6c61706c;
constexpr std::uint64_t kDualityTag = 0x6475616c;
constexpr std::uint64_t kMarkedTag = 0x6d6b6d6f;
constexpr std::uint64_t kInnerMarksTag = 0x6d6b696e;
constexpr std::uint64_t kSampleTag = 0x73616d70;
constexpr std::uint64_t kEcfTag = 0x656366;
constexpr double kKernelReach = 6.0;
constexpr double kPathwiseTolerance = 1e-12;

// Paired estimate: lhs and rhs are per-sample values of the two sides and
// the standard error is that of their difference. Sides equal on every
// sample up to rounding make a pathwise identity, judged deterministically.
EstimatorReport paired_report(std::string name, const std::vector<double>& lhs,
                              const std::vector<double>& rhs) {
  std::vector<double> diff(lhs.size());
  bool pathwise = true;
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    diff[i] = lhs[i] - rhs[i];
    pathwise = pathwise && std::abs(diff[i]) <= kPathwiseTolerance * (1.0 + std::abs(rhs[i]));
  }
  const MeanSe d = mean_se(diff);
  const MeanSe l = mean_se(lhs);
  const MeanSe r = mean_se(rhs);
  if (pathwise) {
    EstimatorReport out = deterministic_report(std::move(name), l.mean, r.mean,
                                               kPathwiseTolerance * (1.0 + std::abs(r.mean)));
    out.nsamples = d.n;
    return out;
  }
  return statistical_report(std::move(name), l.mean, r.mean, d.se, d.n);
}

struct ComplexStats {
  std::complex<double> mean;
  double se = 0.0;
};

ComplexStats complex_stats(const std::vector<std::complex<double>>& zs) {
  ComplexStats out;
  const double n = static_cast<double>(zs.size());
  if (zs.empty()) return out;
  for (const auto& z : zs) out.mean += z;
  out.mean /= n;
  if (zs.size() < 2) return out;
  double var_re = 0.0;
  double var_im = 0.0;
  for (const auto& z : zs) {
    var_re += std::pow(z.real() - out.mean.real(), 2);
    var_im += std::pow(z.imag() - out.mean.imag(), 2);
  }
  out.se = std::sqrt((var_re + var_im) / (n - 1.0) / n);
  return out;
}

double gaussian(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double sample_std(const std::vector<double>& xs) {
  const MeanSe s = mean_se(xs);
  return s.se * std::sqrt(static_cast<double>(xs.size()));
}

std::vector<double> regular_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  }
  return g;
}

std::size_t grid_points(double span, double h, std::size_t floor, std::size_t cap) {
  const auto wanted = static_cast<std::size_t>(std::ceil(span / (h / 4.0))) + 1;
  return std::clamp(wanted, floor, cap);
}

double trapezoid_weight(std::size_t i, std::size_t n) { return (i == 0 || i + 1 == n) ? 0.5 : 1.0; }

}  // namespace

EstimatorReport laplace_check(const IntensityModel& model, const MarkFn& f, std::size_t nsamples,
                              std::uint64_t seed, int jobs) {
  const double horizon = model.horizon();
  const double nu_f = horizon * model.sigma_integrate(f);
  const double re = horizon * model.sigma_integrate([&](const Vector& x) { return 1.0 - std::cos(f(x)); });
  const double im = horizon * model.sigma_integrate([&](const Vector& x) {
    const double v = f(x);
    return v - std::sin(v);
  });
  const std::complex<double> reference = std::exp(-std::complex<double>(re, im));
  const auto draws = parallel_map<std::complex<double>>(nsamples, jobs, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, kLaplaceTag, i);
    const Configuration cfg = sample_configuration(model, rng);
    double n = 0.0;
    for (const auto& a : cfg) n += f(a.mark);
    return std::exp(std::complex<double>(0.0, n - nu_f));
  });
  const ComplexStats stats = complex_stats(draws);
  return statistical_report("laplace", stats.mean, reference, stats.se, nsamples);
}

std::pair<EstimatorReport, EstimatorReport> duality_check(
    const IntensityModel& model, const std::function<double(const Configuration&)>& g_of_config,
    const MarkFn& g, std::size_t nsamples, std::uint64_t seed, int jobs) {
  const double horizon = model.horizon();
  const double total_mass = horizon * model.rate();
  const double nu_g = horizon * model.sigma_integrate(g);
  struct Sides {
    double creation_lhs, creation_rhs, annihilation_lhs, annihilation_rhs;
  };
  const auto draws = parallel_map<Sides>(nsamples, jobs, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, kDualityTag, i);
    const Configuration cfg = sample_configuration(model, rng);
    Sides s{};
    // int eps+H dnu by one point drawn from nu / nu(E)
    Atom extra{horizon * rng.uniform(), model.sample_mark(rng)};
    while (std::any_of(cfg.begin(), cfg.end(), [&](const Atom& a) { return a.time == extra.time; })) {
      extra.time = horizon * rng.uniform();
    }
    s.creation_lhs = total_mass * g_of_config(add_particle(cfg, extra)) * g(extra.mark);
    const double g_here = g_of_config(cfg);
    s.creation_rhs = 0.0;
    s.annihilation_lhs = 0.0;
    for (const auto& a : cfg) {
      const double ga = g(a.mark);
      s.creation_rhs += g_here * ga;
      s.annihilation_lhs += g_of_config(remove_particle(cfg, a)) * ga;
    }
    s.annihilation_rhs = g_here * nu_g;
    return s;
  });
  std::vector<double> a(nsamples), b(nsamples), c(nsamples), d(nsamples);
  for (std::size_t i = 0; i < nsamples; ++i) {
    a[i] = draws[i].creation_lhs;
    b[i] = draws[i].creation_rhs;
    c[i] = draws[i].annihilation_lhs;
    d[i] = draws[i].annihilation_rhs;
  }
  return {paired_report("duality_creation", a, b), paired_report("duality_annihilation", c, d)};
}

EstimatorReport marked_moment_check(const IntensityModel& model, const MarkedIntegrand& f,
                                    std::size_t nsamples, std::uint64_t seed, int jobs) {
  std::vector<double> lhs(nsamples), rhs(nsamples);
  parallel_for(nsamples, jobs, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, kMarkedTag, i);
    const Configuration cfg = sample_configuration(model, rng);
    double integral = 0.0;
    double first = 0.0;
    double first_sq = 0.0;
    double second = 0.0;
    for (const auto& a : cfg) {
      integral += f.value(cfg, a, rng.uniform());
      const double m1 = f.rho_mean(cfg, a);
      first += m1;
      first_sq += m1 * m1;
      second += f.rho_square(cfg, a);
    }
    lhs[i] = integral * integral;
    rhs[i] = first * first - first_sq + second;
  });
  return paired_report("marked_second_moment", lhs, rhs);
}

std::pair<EstimatorReport, EstimatorReport> mark_identities_check(const IntensityModel& model,
                                                                  const MarkedIntegrand& f,
                                                                  std::size_t nsamples,
                                                                  std::size_t n_inner,
                                                                  std::uint64_t seed, int jobs) {
  if (n_inner == 0) throw Error(ErrorKind::Domain, "mark_identities_check: n_inner >= 1");
  struct Sides {
    double exp_mc, exp_closed, sum_mc, sum_closed;
  };
  const auto draws = parallel_map<Sides>(nsamples, jobs, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, kMarkedTag, i);
    const Configuration cfg = sample_configuration(model, rng);
    Sides s{0.0, 0.0, 0.0, 0.0};
    double log_closed = 0.0;
    for (const auto& a : cfg) {
      const double m1 = f.rho_mean(cfg, a);
      log_closed += std::log(m1);
      s.sum_closed += m1;
    }
    s.exp_closed = std::exp(log_closed);
    Rng inner = Rng::stream(seed, kInnerMarksTag, i);
    for (std::size_t j = 0; j < n_inner; ++j) {
      double log_sum = 0.0;
      double sum = 0.0;
      for (const auto& a : cfg) {
        const double v = f.value(cfg, a, inner.uniform_open());
        if (!(v > 0.0 && v <= 1.0)) {
          throw Error(ErrorKind::Domain, "mark_identities_check: F must take values in (0, 1]");
        }
        log_sum += std::log(v);
        sum += v;
      }
      s.exp_mc += std::exp(log_sum);
      s.sum_mc += sum;
    }
    s.exp_mc /= static_cast<double>(n_inner);
    s.sum_mc /= static_cast<double>(n_inner);
    return s;
  });
  std::vector<double> a(nsamples), b(nsamples), c(nsamples), d(nsamples);
  for (std::size_t i = 0; i < nsamples; ++i) {
    a[i] = draws[i].exp_mc;
    b[i] = draws[i].exp_closed;
    c[i] = draws[i].sum_mc;
    d[i] = draws[i].sum_closed;
  }
  return {paired_report("mark_exponential", a, b), paired_report("mark_mean", c, d)};
}

std::vector<Vector> sample_functional(const Functional& f, const IntensityModel& model,
                                      std::size_t nsamples, std::uint64_t seed, int jobs) {
  return parallel_map<Vector>(nsamples, jobs, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, kSampleTag, i);
    return f.value(sample_configuration(model, rng));
  });
}

double silverman_bandwidth(const std::vector<double>& xs, int dim) {
  const double n = static_cast<double>(xs.size());
  const double sd = sample_std(xs);
  if (dim == 1) return sd * std::pow(4.0 / (3.0 * n), 0.2);
  return sd * std::pow(n, -1.0 / 6.0);
}

double kde_at(const std::vector<double>& xs, double bandwidth, double x) {
  double total = 0.0;
  for (double v : xs) total += gaussian((x - v) / bandwidth);
  return total / (static_cast<double>(xs.size()) * bandwidth);
}

KdeResult kde(const std::vector<Vector>& samples, double bandwidth_override) {
  if (samples.empty()) throw Error(ErrorKind::Domain, "kde: empty sample");
  KdeResult out;
  out.dim = static_cast<int>(samples.front().size());
  if (out.dim != 1 && out.dim != 2) throw Error(ErrorKind::Unsupported, "kde: dimension must be 1 or 2");
  std::vector<std::vector<double>> coords(static_cast<std::size_t>(out.dim));
  for (const auto& s : samples) {
    if (!s.allFinite()) throw Error(ErrorKind::Domain, "kde: non-finite sample");
    for (int k = 0; k < out.dim; ++k) coords[static_cast<std::size_t>(k)].push_back(s(k));
  }
  out.bandwidth = Vector(out.dim);
  for (int k = 0; k < out.dim; ++k) {
    const auto& c = coords[static_cast<std::size_t>(k)];
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    if (*lo == *hi) {
      out.degenerate = true;
      out.atom = samples.front();
      return out;
    }
    out.bandwidth(k) =
        bandwidth_override > 0.0 ? bandwidth_override : silverman_bandwidth(c, out.dim);
  }
  const double n = static_cast<double>(samples.size());
  auto axis = [&](int k, std::size_t floor, std::size_t cap) {
    const auto& c = coords[static_cast<std::size_t>(k)];
    const auto [lo, hi] = std::minmax_element(c.begin(), c.end());
    const double h = out.bandwidth(k);
    const double a = *lo - kKernelReach * h;
    const double b = *hi + kKernelReach * h;
    return regular_grid(a, b, grid_points(b - a, h, floor, cap));
  };
  out.grid_x = axis(0, 512, 1 << 16);
  const double hx = out.bandwidth(0);
  const double dx = out.grid_x[1] - out.grid_x[0];
  auto window = [](const std::vector<double>& grid, double step, double centre, double reach) {
    const double first = grid.front();
    const auto lo = static_cast<long>(std::floor((centre - reach - first) / step));
    const auto hi = static_cast<long>(std::ceil((centre + reach - first) / step));
    const long last = static_cast<long>(grid.size()) - 1;
    return std::pair<long, long>{std::clamp(lo, 0L, last), std::clamp(hi, 0L, last)};
  };
  if (out.dim == 1) {
    out.density = Matrix::Zero(static_cast<Eigen::Index>(out.grid_x.size()), 1);
    for (const auto& s : samples) {
      const auto [lo, hi] = window(out.grid_x, dx, s(0), kKernelReach * hx);
      for (long i = lo; i <= hi; ++i) {
        out.density(i, 0) += gaussian((out.grid_x[static_cast<std::size_t>(i)] - s(0)) / hx);
      }
    }
    out.density /= n * hx;
    double integral = 0.0;
    for (std::size_t i = 0; i < out.grid_x.size(); ++i) {
      integral += trapezoid_weight(i, out.grid_x.size()) * out.density(static_cast<Eigen::Index>(i), 0);
    }
    out.integral = integral * dx;
    return out;
  }
  out.grid_x = axis(0, 128, 512);
  out.grid_y = axis(1, 128, 512);
  const double hy = out.bandwidth(1);
  const double dx2 = out.grid_x[1] - out.grid_x[0];
  const double dy = out.grid_y[1] - out.grid_y[0];
  out.density = Matrix::Zero(static_cast<Eigen::Index>(out.grid_x.size()),
                             static_cast<Eigen::Index>(out.grid_y.size()));
  std::vector<double> wy;
  for (const auto& s : samples) {
    const auto [xlo, xhi] = window(out.grid_x, dx2, s(0), kKernelReach * hx);
    const auto [ylo, yhi] = window(out.grid_y, dy, s(1), kKernelReach * hy);
    wy.assign(static_cast<std::size_t>(yhi - ylo + 1), 0.0);
    for (long j = ylo; j <= yhi; ++j) {
      wy[static_cast<std::size_t>(j - ylo)] = gaussian((out.grid_y[static_cast<std::size_t>(j)] - s(1)) / hy);
    }
    for (long i = xlo; i <= xhi; ++i) {
      const double wx = gaussian((out.grid_x[static_cast<std::size_t>(i)] - s(0)) / hx);
      for (long j = ylo; j <= yhi; ++j) out.density(i, j) += wx * wy[static_cast<std::size_t>(j - ylo)];
    }
  }
  out.density /= n * hx * hy;
  double integral = 0.0;
  for (std::size_t i = 0; i < out.grid_x.size(); ++i) {
    for (std::size_t j = 0; j < out.grid_y.size(); ++j) {
      integral += trapezoid_weight(i, out.grid_x.size()) * trapezoid_weight(j, out.grid_y.size()) *
                  out.density(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  out.integral = integral * dx2 * dy;
  return out;
}

KdeResult kde(const Functional& f, const IntensityModel& model, std::size_t nsamples,
              std::uint64_t seed, double bandwidth_override, int jobs) {
  if (f.out_dim > 2) throw Error(ErrorKind::Unsupported, "kde: functional dimension above 2");
  return kde(sample_functional(f, model, nsamples, seed, jobs), bandwidth_override);
}

void write_kde_csv(std::ostream& out, const KdeResult& k) {
  out << std::setprecision(17);
  if (k.degenerate) {
    out << "atom\n";
    for (Eigen::Index i = 0; i < k.atom.size(); ++i) out << (i ? "," : "") << k.atom(i);
    out << '\n';
    return;
  }
  if (k.dim == 1) {
    out << "x,density\n";
    for (std::size_t i = 0; i < k.grid_x.size(); ++i) {
      out << k.grid_x[i] << ',' << k.density(static_cast<Eigen::Index>(i), 0) << '\n';
    }
    return;
  }
  out << "x,y,density\n";
  for (std::size_t i = 0; i < k.grid_x.size(); ++i) {
    for (std::size_t j = 0; j < k.grid_y.size(); ++j) {
      out << k.grid_x[i] << ',' << k.grid_y[j] << ','
          << k.density(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) << '\n';
    }
  }
}

EcfCurve ecf(const std::vector<double>& values, const std::vector<double>& u_grid) {
  EcfCurve out;
  const double n = static_cast<double>(values.size());
  for (double u : u_grid) {
    std::complex<double> total;
    for (double v : values) total += std::exp(std::complex<double>(0.0, u * v));
    out.u.push_back(u);
    out.modulus.push_back(std::abs(total) / n);
    out.se.push_back(1.0 / std::sqrt(n));
  }
  return out;
}

EcfCurve ecf(const Functional& f, const IntensityModel& model, std::size_t nsamples,
             const std::vector<double>& u_grid, std::uint64_t seed, int jobs) {
  if (f.out_dim != 1) throw Error(ErrorKind::DimensionMismatch, "ecf: scalar functional required");
  const auto samples = parallel_map<double>(nsamples, jobs, [&](std::size_t i) {
    Rng rng = Rng::stream(seed, kEcfTag, i);
    return f.value(sample_configuration(model, rng))(0);
  });
  return ecf(samples, u_grid);
}

double levy_modulus(const IntensityModel& model, double t, double u) {
  if (model.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "levy_modulus: d must be 1");
  return std::exp(-t * model.sigma_integrate([u](const Vector& x) { return 1.0 - std::cos(u * x(0)); }));
}

void write_ecf_csv(std::ostream& out, const EcfCurve& c) {
  out << "u,modulus,se\n" << std::setprecision(17);
  for (std::size_t i = 0; i < c.u.size(); ++i) {
    out << c.u[i] << ',' << c.modulus[i] << ',' << c.se[i] << '\n';
  }
}

RajchmanDemo rajchman_demo(int n_max, int k_max, std::size_t nsamples, std::uint64_t seed,
                           int jobs) {
  const IntensityModel model = atomic_dyadic(1.0, n_max, 0);
  RajchmanDemo out;
  double series = 0.0;
  for (int j = 0; j < 64; ++j) series += 1.0 - std::cos(std::numbers::pi / std::ldexp(1.0, j));
  out.limit = std::exp(-series);
  const double mean = model.mean()(0);
  std::vector<double> values;
  if (nsamples > 0) {
    values = parallel_map<double>(nsamples, jobs, [&](std::size_t i) {
      Rng rng = Rng::stream(seed, kEcfTag, i);
      double n = 0.0;
      for (const auto& a : sample_configuration(model, rng)) n += a.mark(0);
      return n - mean;
    });
  }
  for (int k = 0; k <= k_max; ++k) {
    RajchmanRow row;
    row.k = k;
    row.u = std::ldexp(std::numbers::pi, k);
    row.closed = levy_modulus(model, 1.0, row.u);
    if (!values.empty()) {
      std::vector<std::complex<double>> zs;
      zs.reserve(values.size());
      for (double v : values) zs.push_back(std::exp(std::complex<double>(0.0, row.u * v)));
      const ComplexStats stats = complex_stats(zs);
      row.monte_carlo = std::abs(stats.mean);
      row.se = stats.se;
    }
    out.rows.push_back(row);
  }
  return out;
}

TruncationLadder ecf_truncation_ladder(double c, double a, const std::vector<double>& epsilons,
                                       const std::vector<double>& u_grid, double t) {
  std::vector<double> eps = epsilons;
  std::sort(eps.begin(), eps.end(), std::greater<>());
  TruncationLadder out;
  std::vector<double> previous(u_grid.size(), 1.0);
  for (double e : eps) {
    const IntensityModel model = power_truncated(t, c, a, e, true);
    for (std::size_t i = 0; i < u_grid.size(); ++i) {
      const double m = levy_modulus(model, t, u_grid[i]);
      out.rows.push_back({e, u_grid[i], m});
      if (m > previous[i] * (1.0 + 1e-12)) out.monotone = false;
      previous[i] = m;
    }
  }
  return out;
}

namespace {

Vector scalar(double v) {
  Vector x(1);
  x(0) = v;
  return x;
}

double n_of(const Configuration& cfg, const MarkFn& f) {
  double total = 0.0;
  for (const auto& a : cfg) total += f(a.mark);
  return total;
}

}  // namespace

std::vector<EstimatorReport> statistical_suite(std::size_t nsamples, std::uint64_t seed,
                                               int jobs) {
  const IntensityModel sym = power_truncated(1.0, 0.5, 0.5, 0.05, true);
  const IntensityModel one_sided = power_truncated(1.0, 0.3, 0.8, 0.1, false);
  const IntensityModel planar = polar(1.0, 0.1);
  const IntensityModel box = compound_poisson(
      1.0, scalar(-1.0), scalar(1.0), [](const Vector& x) { return 2.0 + x(0); }, 3.0);
  std::vector<EstimatorReport> out;
  std::uint64_t stream = 0;
  auto next_seed = [&] { return mix64(seed ^ mix64(++stream)); };
  auto push = [&](EstimatorReport r, const std::string& label) {
    r.name += ":" + label;
    out.push_back(std::move(r));
  };

  // Laplace functional (8)
  push(laplace_check(sym, [](const Vector& x) { return 0.3 * x(0); }, nsamples, next_seed(), jobs), "sym,0.3x");
  push(laplace_check(sym, [](const Vector& x) { return -0.3 * x(0); }, nsamples, next_seed(), jobs), "sym,-0.3x");
  push(laplace_check(sym, [](const Vector& x) { return 2.0 * std::sin(3.0 * x(0)); }, nsamples, next_seed(), jobs), "sym,2sin3x");
  push(laplace_check(one_sided, [](const Vector& x) { return 1.2 * x(0); }, nsamples, next_seed(), jobs), "one_sided,1.2x");
  push(laplace_check(box, [](const Vector& x) { return x(0) > 0.0 ? 0.8 : 0.0; }, nsamples, next_seed(), jobs), "box,indicator");
  push(laplace_check(box, [](const Vector& x) { return x(0) * x(0); }, nsamples, next_seed(), jobs), "box,x2");
  push(laplace_check(planar, [](const Vector& x) { return x(0) + 0.5 * x(1); }, nsamples, next_seed(), jobs), "polar,linear");
  push(laplace_check(planar, [](const Vector& x) { return std::cos(4.0 * x(0)); }, nsamples, next_seed(), jobs), "polar,cos4x");

  // Creation/annihilation duality (4 x 2)
  auto add_pair = [&](std::pair<EstimatorReport, EstimatorReport> p, const std::string& label) {
    push(std::move(p.first), label);
    push(std::move(p.second), label);
  };
  const MarkFn sq = [](const Vector& x) { return x.squaredNorm(); };
  add_pair(duality_check(sym, [&](const Configuration& c) { return std::exp(-n_of(c, sq)); }, sq,
                        nsamples, next_seed(), jobs), "sym,exp(-N(x2)),x2");
  add_pair(duality_check(box, [](const Configuration& c) {
             return 1.0 / (1.0 + n_of(c, [](const Vector& x) { return std::abs(x(0)); }));
           }, [](const Vector& x) { return std::cos(x(0)); }, nsamples, next_seed(), jobs),
           "box,1/(1+N|x|),cos");
  add_pair(duality_check(planar, [](const Configuration& c) {
             return static_cast<double>(c.size()) * std::exp(-0.2 * static_cast<double>(c.size()));
           }, sq, nsamples, next_seed(), jobs), "polar,count,x2");
  add_pair(duality_check(one_sided, [](const Configuration& c) {
             return std::exp(-n_of(c, [](const Vector& x) { return x(0); }));
           }, [](const Vector& x) { return x(0); }, nsamples, next_seed(), jobs),
           "one_sided,exp(-N(x)),x");

  // Marked second moments (4)
  MarkedIntegrand centred{
      [](const Configuration&, const Atom& a, double r) { return a.mark(0) * (r - 0.5); },
      [](const Configuration&, const Atom&) { return 0.0; },
      [](const Configuration&, const Atom& a) { return a.mark(0) * a.mark(0) / 12.0; }};
  push(marked_moment_check(sym, centred, nsamples, next_seed(), jobs), "sym,x(r-1/2)");
  MarkedIntegrand square_r{
      [](const Configuration&, const Atom& a, double r) { return a.mark(0) * a.mark(0) * r; },
      [](const Configuration&, const Atom& a) { return a.mark(0) * a.mark(0) / 2.0; },
      [](const Configuration&, const Atom& a) { return std::pow(a.mark(0), 4) / 3.0; }};
  push(marked_moment_check(box, square_r, nsamples, next_seed(), jobs), "box,x2r");
  MarkedIntegrand cosine{
      [](const Configuration&, const Atom& a, double r) {
        return std::cos(2.0 * std::numbers::pi * r) + a.mark(0);
      },
      [](const Configuration&, const Atom& a) { return a.mark(0); },
      [](const Configuration&, const Atom& a) { return 0.5 + a.mark(0) * a.mark(0); }};
  push(marked_moment_check(one_sided, cosine, nsamples, next_seed(), jobs), "one_sided,cos+x");
  auto weight = [sq](const Configuration& c) { return std::exp(-n_of(c, sq)); };
  MarkedIntegrand weighted{
      [weight](const Configuration& c, const Atom& a, double r) { return weight(c) * a.mark(0) * r; },
      [weight](const Configuration& c, const Atom& a) { return weight(c) * a.mark(0) / 2.0; },
      [weight](const Configuration& c, const Atom& a) {
        return std::pow(weight(c) * a.mark(0), 2) / 3.0;
      }};
  push(marked_moment_check(sym, weighted, nsamples, next_seed(), jobs), "sym,G x r");

  // Mark-expectation identities (3 x 2)
  const std::size_t n_inner = 8;
  MarkedIntegrand gaussian_r{
      [](const Configuration&, const Atom& a, double r) { return std::exp(-a.mark.squaredNorm() * r); },
      [](const Configuration&, const Atom& a) {
        const double s = a.mark.squaredNorm();
        return s == 0.0 ? 1.0 : -std::expm1(-s) / s;
      },
      nullptr};
  add_pair(mark_identities_check(sym, gaussian_r, nsamples, n_inner, next_seed(), jobs), "sym,exp(-x2r)");
  MarkedIntegrand linear_r{
      [](const Configuration&, const Atom& a, double r) { return 1.0 - 0.5 * r * std::abs(a.mark(0)); },
      [](const Configuration&, const Atom& a) { return 1.0 - 0.25 * std::abs(a.mark(0)); },
      nullptr};
  add_pair(mark_identities_check(box, linear_r, nsamples, n_inner, next_seed(), jobs), "box,1-r|x|/2");
  MarkedIntegrand power_r{
      [](const Configuration&, const Atom& a, double r) { return std::pow(r, a.mark.norm()); },
      [](const Configuration&, const Atom& a) { return 1.0 / (1.0 + a.mark.norm()); },
      nullptr};
  add_pair(mark_identities_check(planar, power_r, nsamples, n_inner, next_seed(), jobs), "polar,r^|x|");

  // Chaos orthogonality (9)
  const MarkFunction u{[](const Vector& x) { return x(0); }, nullptr, 1.0};
  const MarkFunction v{[](const Vector& x) { return std::cos(x(0)); }, nullptr, 1.0};
  for (int m = 1; m <= 3; ++m) {
    for (int n = 1; n <= 3; ++n) {
      push(orthogonality_mc(box, u, v, m, n, nsamples, next_seed(), jobs), "box,x,cos");
    }
  }

  // Mehler formula on the exponential vector (2)
  const ResamplingSemigroup sg{box};
  const MarkFunction g{[](const Vector& x) { return -0.5 * x(0) * x(0); }, nullptr, 0.5};
  push(mehler_exponential_check(sg, g, 0.3, nsamples, n_inner, next_seed(), jobs), "box,t=0.3");
  push(mehler_exponential_check(sg, g, 1.0, nsamples, n_inner, next_seed(), jobs), "box,t=1");

  // Second quantization (3)
  const std::size_t sq_inner = 16;
  const std::size_t sq_samples = std::max<std::size_t>(nsamples / 4, 1000);
  push(second_quantization_check(sg, u, 1, 0.2, sq_samples, sq_inner, next_seed(), jobs), "box,t=0.2");
  push(second_quantization_check(sg, u, 2, 0.5, sq_samples, sq_inner, next_seed(), jobs), "box,t=0.5");
  push(second_quantization_check(sg, u, 2, 1.0, sq_samples, sq_inner, next_seed(), jobs), "box,t=1");
  return out;
}

}  // namespace lentp
