#include "lentp/functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lentp/quadrature.hpp"

namespace lentp {
namespace {

// Compensated path Y_s = sum_{t_i <= s} x_i - s mu of a configuration.
class CompensatedPath {
 public:
  CompensatedPath(const Configuration& cfg, const Vector& mu) : mu_(mu) {
    times_.reserve(cfg.size());
    cum_.reserve(cfg.size() + 1);
    cum_.push_back(Vector::Zero(cfg.dim()));
    for (const auto& a : cfg) {
      times_.push_back(a.time);
      cum_.push_back(cum_.back() + a.mark);
    }
  }

  /// Number of jumps at times <= s.
  std::size_t count_through(double s) const {
    return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), s) - times_.begin());
  }
  std::size_t count_before(double s) const {
    return static_cast<std::size_t>(std::lower_bound(times_.begin(), times_.end(), s) - times_.begin());
  }

  Vector at(double s) const { return cum_[count_through(s)] - s * mu_; }
  Vector before(double s) const { return cum_[count_before(s)] - s * mu_; }
  const Vector& jump_sum(std::size_t k) const { return cum_[k]; }
  const std::vector<double>& times() const { return times_; }
  const Vector& mu() const { return mu_; }

 private:
  Vector mu_;
  std::vector<double> times_;
  std::vector<Vector> cum_;
};

void check_time(double t, double horizon, const char* who) {
  if (!(t > 0.0 && t <= horizon)) {
    throw Error(ErrorKind::Domain, std::string(who) + ": t must lie in (0, T]");
  }
}

Matrix zero_if_after(double alpha, double t, int m, int d) {
  (void)alpha;
  (void)t;
  return Matrix::Zero(m, d);
}

}  // namespace

double fd_step(double x) { return std::max(1e-5, 1e-7 * std::abs(x)); }

Matrix fd_add_derivative(const Functional& f, const Configuration& cfg, double t,
                         const Vector& x) {
  Matrix out(f.out_dim, x.size());
  Vector probe = x;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double h = fd_step(x(j));
    probe(j) = x(j) + h;
    const Vector up = f.value(add_particle(cfg, Atom{t, probe}));
    probe(j) = x(j) - h;
    const Vector down = f.value(add_particle(cfg, Atom{t, probe}));
    probe(j) = x(j);
    out.col(j) = (up - down) / (2.0 * h);
  }
  return out;
}

Matrix add_derivative(const Functional& f, const Configuration& cfg, double t, const Vector& x,
                      DerivativeMode mode) {
  if (mode == DerivativeMode::Closed && f.has_closed_derivative && f.add_derivative) {
    return f.add_derivative(cfg, t, x);
  }
  return fd_add_derivative(f, cfg, t, x);
}

double PiecewiseConstant::at(double s) const {
  const auto k = std::upper_bound(breaks.begin(), breaks.end(), s) - breaks.begin();
  return values.at(static_cast<std::size_t>(k));
}

double PiecewiseConstant::left_limit(double s) const {
  const auto k = std::lower_bound(breaks.begin(), breaks.end(), s) - breaks.begin();
  return values.at(static_cast<std::size_t>(k));
}

Functional make_path_eval(const IntensityModel& model, double t) {
  check_time(t, model.horizon(), "make_path_eval");
  const Vector mu = model.mean();
  const int d = model.dim();
  Functional f;
  f.out_dim = d;
  f.mark_dim = d;
  f.label = "path_eval";
  f.has_closed_derivative = true;
  f.value = [mu, t](const Configuration& cfg) { return CompensatedPath(cfg, mu).at(t); };
  f.add_derivative = [t, d](const Configuration&, double alpha, const Vector&) -> Matrix {
    if (alpha > t) return zero_if_after(alpha, t, d, d);
    return Matrix::Identity(d, d);
  };
  return f;
}

namespace {

double doleans_value(const Configuration& cfg, double mu, double t) {
  double product = 1.0;
  for (const auto& a : cfg) {
    if (a.time > t) break;
    const double jump = a.mark(0);
    if (!(jump > -1.0)) {
      throw Error(ErrorKind::Domain, "doleans: jump <= -1 in configuration");
    }
    product *= 1.0 + jump;
  }
  // e^{Y_t} prod e^{-dY} collapses to the drift factor
  return std::exp(-t * mu) * product;
}

}  // namespace

Functional make_doleans(const IntensityModel& model, double t) {
  check_time(t, model.horizon(), "make_doleans");
  if (model.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "make_doleans: d must be 1");
  const double mu = model.mean()(0);
  Functional f;
  f.out_dim = 1;
  f.mark_dim = 1;
  f.label = "doleans";
  f.has_closed_derivative = true;
  f.value = [mu, t](const Configuration& cfg) {
    Vector v(1);
    v(0) = doleans_value(cfg, mu, t);
    return v;
  };
  // epsilon^+ multiplies the value by (1 + y): the y-derivative is the
  // value on the background configuration.
  f.add_derivative = [mu, t](const Configuration& cfg, double alpha, const Vector&) {
    Matrix out = Matrix::Zero(1, 1);
    if (alpha <= t) out(0, 0) = doleans_value(cfg, mu, t);
    return out;
  };
  return f;
}

Functional make_pair_doleans(const IntensityModel& model, double t) {
  Functional path = make_path_eval(model, t);
  Functional exp = make_doleans(model, t);
  Functional f = stack({path, exp});
  f.label = "pair_doleans";
  return f;
}

Functional make_stochastic_area(const IntensityModel& model, double t) {
  if (model.dim() != 2) {
    throw Error(ErrorKind::DimensionMismatch, "make_stochastic_area: d must be 2");
  }
  check_time(t, model.horizon(), "make_stochastic_area");
  const Vector mu = model.mean();
  Functional f;
  f.out_dim = 3;
  f.mark_dim = 2;
  f.label = "area";
  f.has_closed_derivative = true;
  f.value = [mu, t](const Configuration& cfg) {
    CompensatedPath path(cfg, mu);
    double area = 0.0;
    for (const auto& a : cfg) {
      if (a.time > t) break;
      const Vector left = path.before(a.time);
      area += left(0) * a.mark(1) - left(1) * a.mark(0);
      // drift parts: -mu_2 int X_1 ds + mu_1 int X_2 ds; the mu_1 mu_2 t^2/2
      // pieces cancel, leaving the jump contributions below
      area += -mu(1) * a.mark(0) * (t - a.time) + mu(0) * a.mark(1) * (t - a.time);
    }
    const Vector end = path.at(t);
    Vector v(3);
    v << end(0), end(1), area;
    return v;
  };
  // With the compensated path the drift corrections fold into X(t) - X(alpha),
  // so the added-particle row keeps the driftless algebraic form.
  f.add_derivative = [mu, t](const Configuration& cfg, double alpha, const Vector&) {
    Matrix out = Matrix::Zero(3, 2);
    if (alpha > t) return out;
    CompensatedPath path(cfg, mu);
    const Vector end = path.at(t);
    const Vector at_alpha = path.at(alpha);
    out(0, 0) = 1.0;
    out(1, 1) = 1.0;
    out(2, 0) = end(1) - 2.0 * at_alpha(1);
    out(2, 1) = -(end(0) - 2.0 * at_alpha(0));
    return out;
  };
  return f;
}

Functional make_time_integral(const IntensityModel& model, VectorMap g, double t) {
  check_time(t, model.horizon(), "make_time_integral");
  const Vector mu = model.mean();
  const int d = model.dim();
  const int m = static_cast<int>(g.value(Vector::Zero(d)).size());
  Functional f;
  f.out_dim = m;
  f.mark_dim = d;
  f.label = "time_integral";
  f.has_closed_derivative = static_cast<bool>(g.jacobian);
  f.value = [g, mu, t, m](const Configuration& cfg) {
    CompensatedPath path(cfg, mu);
    Vector total = Vector::Zero(m);
    double a = 0.0;
    std::size_t k = 0;
    const auto& times = path.times();
    while (a < t) {
      const double b = (k < times.size() && times[k] < t) ? times[k] : t;
      if (b > a) {
        const Vector& jumps = path.jump_sum(k);
        total += gauss_legendre8<Vector>([&](double s) { return g.value(jumps - s * mu); }, a, b);
      }
      a = b;
      if (k < times.size() && times[k] < t) ++k;
      else break;
    }
    return total;
  };
  if (g.jacobian) {
    f.add_derivative = [g, mu, t, m, d](const Configuration& cfg, double alpha,
                                        const Vector& y) {
      Matrix total = Matrix::Zero(m, d);
      if (alpha >= t) return total;
      CompensatedPath path(cfg, mu);
      const auto& times = path.times();
      std::size_t k = path.count_through(alpha);
      double a = alpha;
      while (a < t) {
        const double b = (k < times.size() && times[k] < t) ? times[k] : t;
        if (b > a) {
          const Vector shifted = path.jump_sum(k) + y;
          total += gauss_legendre8<Matrix>(
              [&](double s) { return g.jacobian(shifted - s * mu); }, a, b);
        }
        a = b;
        if (k < times.size() && times[k] < t) ++k;
        else break;
      }
      return total;
    };
  }
  return f;
}

namespace {

// int_a^b e^{-xi_s} ds for xi_s = xi_a - mu (s - a).
double exp_drift_integral(double xi_a, double mu, double a, double b) {
  const double len = b - a;
  const double z = mu * len;
  const double factor = (std::abs(z) < 1e-12) ? 1.0 + 0.5 * z : std::expm1(z) / z;
  return std::exp(-xi_a) * len * factor;
}

struct OuPieces {
  double xi_t = 0.0;
  double integral = 0.0;  // int_0^t e^{-xi_{s-}} d eta_s
};

// Accumulates int e^{-xi_{s-}} d eta_s over [0, upto] (jumps at times
// <= upto when `closed`, < upto otherwise).
double ou_integral(const Configuration& cfg, const Vector& mu, double upto, bool closed) {
  double xi = 0.0;
  double s = 0.0;
  double acc = 0.0;
  for (const auto& a : cfg) {
    if (a.time > upto || (!closed && a.time == upto)) break;
    acc += -mu(1) * exp_drift_integral(xi, mu(0), s, a.time);
    xi -= mu(0) * (a.time - s);
    s = a.time;
    acc += std::exp(-xi) * a.mark(1);
    xi += a.mark(0);
  }
  acc += -mu(1) * exp_drift_integral(xi, mu(0), s, upto);
  return acc;
}

}  // namespace

Functional make_generalized_ou(const IntensityModel& model, double x0, double t) {
  if (model.dim() != 2) {
    throw Error(ErrorKind::DimensionMismatch, "make_generalized_ou: d must be 2");
  }
  check_time(t, model.horizon(), "make_generalized_ou");
  const Vector mu = model.mean();
  Functional f;
  f.out_dim = 1;
  f.mark_dim = 2;
  f.label = "gou";
  f.has_closed_derivative = true;
  f.value = [mu, x0, t](const Configuration& cfg) {
    const double xi_t = CompensatedPath(cfg, mu).at(t)(0);
    Vector v(1);
    v(0) = std::exp(xi_t) * (x0 + ou_integral(cfg, mu, t, true));
    return v;
  };
  f.add_derivative = [mu, x0, t](const Configuration& cfg, double alpha, const Vector& x) {
    Matrix out = Matrix::Zero(1, 2);
    if (alpha > t) return out;
    CompensatedPath path(cfg, mu);
    const double xi_t = path.at(t)(0);
    const double xi_alpha = path.before(alpha)(0);
    const double head = x0 + ou_integral(cfg, mu, alpha, false);
    const double scale = std::exp(xi_t + x(0));
    out(0, 0) = scale * (head + std::exp(-xi_alpha) * x(1));
    out(0, 1) = scale * std::exp(-xi_alpha);
    return out;
  };
  return f;
}

namespace {

struct SupCandidate {
  double location;
  bool left_limit;
  double value;
};

std::vector<SupCandidate> sup_candidates(const Configuration& cfg, const Vector& mu, double t,
                                         const PiecewiseConstant& k, double extra_point) {
  CompensatedPath path(cfg, mu);
  std::vector<double> points{0.0, t};
  for (double s : path.times()) {
    if (s <= t) points.push_back(s);
  }
  for (double s : k.breaks) {
    if (s > 0.0 && s <= t) points.push_back(s);
  }
  if (extra_point > 0.0 && extra_point <= t) points.push_back(extra_point);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<SupCandidate> out;
  out.reserve(2 * points.size());
  for (double s : points) {
    out.push_back({s, false, path.at(s)(0) + k.at(s)});
    if (s > 0.0) out.push_back({s, true, path.before(s)(0) + k.left_limit(s)});
  }
  return out;
}

struct SupSplit {
  double before = -std::numeric_limits<double>::infinity();
  double after = -std::numeric_limits<double>::infinity();
};

// Maximum over the part of the path left untouched by a jump at alpha and
// over the part it shifts.
SupSplit split_sup(const Configuration& cfg, const Vector& mu, double t,
                   const PiecewiseConstant& k, double alpha) {
  SupSplit split;
  for (const auto& c : sup_candidates(cfg, mu, t, k, alpha)) {
    const bool shifted = c.location > alpha || (c.location == alpha && !c.left_limit);
    if (shifted) split.after = std::max(split.after, c.value);
    else split.before = std::max(split.before, c.value);
  }
  return split;
}

}  // namespace

Functional make_running_sup(const IntensityModel& model, double t, PiecewiseConstant k) {
  if (model.dim() != 1) throw Error(ErrorKind::DimensionMismatch, "make_running_sup: d must be 1");
  check_time(t, model.horizon(), "make_running_sup");
  if (k.values.size() != k.breaks.size() + 1 || !std::is_sorted(k.breaks.begin(), k.breaks.end())) {
    throw Error(ErrorKind::Domain, "make_running_sup: malformed piecewise-constant K");
  }
  const Vector mu = model.mean();
  Functional f;
  f.out_dim = 1;
  f.mark_dim = 1;
  f.label = "sup";
  f.has_closed_derivative = true;
  f.value = [mu, t, k](const Configuration& cfg) {
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& c : sup_candidates(cfg, mu, t, k, -1.0)) best = std::max(best, c.value);
    Vector v(1);
    v(0) = best;
    return v;
  };
  // ties resolve to 1 (right-most argmax)
  f.add_derivative = [mu, t, k](const Configuration& cfg, double alpha, const Vector& y) {
    Matrix out = Matrix::Zero(1, 1);
    if (alpha > t) return out;
    const SupSplit split = split_sup(cfg, mu, t, k, alpha);
    out(0, 0) = (split.after + y(0) >= split.before) ? 1.0 : 0.0;
    return out;
  };
  f.near_kink = [mu, t, k](const Configuration& cfg, double alpha, const Vector& y) {
    if (alpha > t) return false;
    const SupSplit split = split_sup(cfg, mu, t, k, alpha);
    return std::abs(split.after + y(0) - split.before) < 1e-3;
  };
  return f;
}

Functional make_nearest_point(const IntensityModel& model) {
  const int d = model.dim();
  Functional f;
  f.out_dim = 1;
  f.mark_dim = d;
  f.label = "nearest";
  f.has_closed_derivative = true;
  auto nearest = [](const Configuration& cfg) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& a : cfg) best = std::min(best, a.mark.norm());
    return best;
  };
  f.value = [nearest](const Configuration& cfg) {
    Vector v(1);
    v(0) = nearest(cfg);
    return v;
  };
  f.add_derivative = [nearest, d](const Configuration& cfg, double, const Vector& x) {
    Matrix out = Matrix::Zero(1, d);
    const double r = x.norm();
    if (r <= nearest(cfg) && r > 0.0) out.row(0) = (x / r).transpose();
    return out;
  };
  f.near_kink = [nearest](const Configuration& cfg, double, const Vector& x) {
    const double current = nearest(cfg);
    return std::isfinite(current) && std::abs(x.norm() - current) < 1e-3;
  };
  return f;
}

namespace {

Vector sde_drift(const IntensityModel& model, const JumpSde& sde, double s, const Vector& state) {
  if (sde.compensator) return sde.compensator(s, state);
  Vector out(sde.state_dim);
  for (int i = 0; i < sde.state_dim; ++i) {
    out(i) = model.sigma_integrate(
        [&](const Vector& u) { return sde.coefficient(s, state, u)(i); });
  }
  return out;
}

void euler_advance(const IntensityModel& model, const JumpSde& sde, Vector& state, double from,
                   double to, double delta) {
  if (!(to > from)) return;
  const double span = to - from;
  const auto steps = static_cast<long>(std::ceil(span / delta - 1e-9));
  double s = from;
  for (long i = 0; i < steps; ++i) {
    const double next = (i + 1 == steps) ? to : from + static_cast<double>(i + 1) * delta;
    state -= (next - s) * sde_drift(model, sde, s, state);
    s = next;
  }
}

}  // namespace

Functional make_jump_sde(const IntensityModel& model, JumpSde sde, const Vector& x0, double t,
                         double delta) {
  if (!(delta > 0.0)) throw Error(ErrorKind::Domain, "make_jump_sde: delta must be positive");
  check_time(t, model.horizon(), "make_jump_sde");
  if (x0.size() != sde.state_dim) {
    throw Error(ErrorKind::DimensionMismatch, "make_jump_sde: x0 has wrong dimension");
  }
  Functional f;
  f.out_dim = sde.state_dim;
  f.mark_dim = model.dim();
  f.label = "jump_sde";
  f.has_closed_derivative = false;
  f.value = [model, sde, x0, t, delta](const Configuration& cfg) {
    Vector state = x0;
    double s = 0.0;
    for (const auto& a : cfg) {
      if (a.time > t) break;
      euler_advance(model, sde, state, s, a.time, delta);
      state += sde.coefficient(a.time, state, a.mark);
      s = a.time;
    }
    euler_advance(model, sde, state, s, t, delta);
    return state;
  };
  f.add_derivative = nullptr;
  return f;
}

JumpSde triangular_sde(const IntensityModel& model) {
  if (model.dim() != 2) throw Error(ErrorKind::DimensionMismatch, "triangular_sde: d must be 2");
  const Vector mu = model.mean();
  JumpSde sde;
  sde.state_dim = 3;
  sde.coefficient = [](double, const Vector& z, const Vector& u) {
    Vector c(3);
    c << u(0), 2.0 * z(0) * u(0) + u(1), z(0) * u(0) + 2.0 * u(1);
    return c;
  };
  sde.compensator = [mu](double, const Vector& z) {
    Vector c(3);
    c << mu(0), 2.0 * z(0) * mu(0) + mu(1), z(0) * mu(0) + 2.0 * mu(1);
    return c;
  };
  return sde;
}

Functional make_triangular_sde(const IntensityModel& model, const Vector& z0, double t, double delta) {
  Functional f = make_jump_sde(model, triangular_sde(model), z0, t, delta);
  const Vector mu = model.mean();
  const double z1 = z0(0);
  f.has_closed_derivative = true;
  // Z^1 shifts by a after alpha; the dY^1 integrals pick up Z^1(alpha-) a at
  // the new jump and a (Y^1_t - Y^1_alpha) afterwards.
  f.add_derivative = [mu, z1, t](const Configuration& cfg, double alpha, const Vector&) {
    Matrix out = Matrix::Zero(3, 2);
    if (alpha > t) return out;
    CompensatedPath path(cfg, mu);
    const double left = z1 + path.before(alpha)(0);
    const double increment = path.at(t)(0) - path.at(alpha)(0);
    out(0, 0) = 1.0;
    out(1, 0) = 2.0 * (left + increment);
    out(2, 0) = left + increment;
    out(1, 1) = 1.0;
    out(2, 1) = 2.0;
    return out;
  };
  return f;
}

Functional make_constant(const Vector& c, int mark_dim) {
  Functional f;
  f.out_dim = static_cast<int>(c.size());
  f.mark_dim = mark_dim;
  f.label = "constant";
  f.has_closed_derivative = true;
  f.value = [c](const Configuration&) { return c; };
  const auto m = c.size();
  f.add_derivative = [m, mark_dim](const Configuration&, double, const Vector&) {
    return Matrix::Zero(m, mark_dim).eval();
  };
  return f;
}

Functional stack(const std::vector<Functional>& fs) {
  if (fs.empty()) throw Error(ErrorKind::Domain, "stack: no functionals");
  Functional f;
  f.mark_dim = fs.front().mark_dim;
  f.out_dim = 0;
  f.has_closed_derivative = true;
  for (const auto& g : fs) {
    if (g.mark_dim != f.mark_dim) {
      throw Error(ErrorKind::DimensionMismatch, "stack: mark dimensions differ");
    }
    f.out_dim += g.out_dim;
    f.has_closed_derivative = f.has_closed_derivative && g.has_closed_derivative;
    f.label += (f.label.empty() ? "" : "+") + g.label;
  }
  const int m = f.out_dim;
  f.value = [fs, m](const Configuration& cfg) {
    Vector v(m);
    int row = 0;
    for (const auto& g : fs) {
      v.segment(row, g.out_dim) = g.value(cfg);
      row += g.out_dim;
    }
    return v;
  };
  if (f.has_closed_derivative) {
    const int d = f.mark_dim;
    f.add_derivative = [fs, m, d](const Configuration& cfg, double t, const Vector& x) {
      Matrix out(m, d);
      int row = 0;
      for (const auto& g : fs) {
        out.middleRows(row, g.out_dim) = g.add_derivative(cfg, t, x);
        row += g.out_dim;
      }
      return out;
    };
  }
  bool any_kink = false;
  for (const auto& g : fs) any_kink = any_kink || static_cast<bool>(g.near_kink);
  if (any_kink) {
    f.near_kink = [fs](const Configuration& cfg, double t, const Vector& x) {
      for (const auto& g : fs) {
        if (g.near_kink && g.near_kink(cfg, t, x)) return true;
      }
      return false;
    };
  }
  return f;
}

Functional compose(const SmoothMap& phi, const Functional& inner) {
  Functional f;
  f.out_dim = 1;
  f.mark_dim = inner.mark_dim;
  f.label = "phi(" + inner.label + ")";
  f.has_closed_derivative = inner.has_closed_derivative;
  f.value = [phi, inner](const Configuration& cfg) {
    Vector v(1);
    v(0) = phi.value(inner.value(cfg));
    return v;
  };
  if (inner.has_closed_derivative) {
    f.add_derivative = [phi, inner](const Configuration& cfg, double t, const Vector& x) {
      const Vector lifted = inner.value(add_particle(cfg, Atom{t, x}));
      return Matrix(phi.gradient(lifted).transpose() * inner.add_derivative(cfg, t, x));
    };
  }
  f.near_kink = inner.near_kink;
  return f;
}

}  // namespace lentp
