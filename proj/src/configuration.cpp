#include "lentp/configuration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace lentp {

bool operator==(const Atom& a, const Atom& b) {
  return a.time == b.time && a.mark.size() == b.mark.size() && a.mark == b.mark;
}

Configuration::Configuration(double horizon, int dim, std::vector<Atom> atoms,
                             std::string intensity_ref)
    : horizon_(horizon), dim_(dim), atoms_(std::move(atoms)), intensity_ref_(std::move(intensity_ref)) {
  if (!(horizon_ > 0.0)) throw Error(ErrorKind::Domain, "configuration: horizon must be positive");
  if (dim_ < 1) throw Error(ErrorKind::Domain, "configuration: dim must be >= 1");
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    const Atom& a = atoms_[i];
    if (a.mark.size() != dim_) {
      throw Error(ErrorKind::DimensionMismatch, "configuration: atom mark has wrong dimension");
    }
    if (!(a.time >= 0.0 && a.time <= horizon_)) {
      throw Error(ErrorKind::Domain, "configuration: atom time outside [0, T]");
    }
    if (i > 0 && !(atoms_[i - 1].time < a.time)) {
      throw Error(ErrorKind::Domain,
                  "configuration: atom times must be strictly increasing");
    }
  }
}

Configuration Configuration::from_unsorted(double horizon, int dim, std::vector<Atom> atoms,
                                           std::string intensity_ref) {
  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.time < b.time; });
  return Configuration(horizon, dim, std::move(atoms), std::move(intensity_ref));
}

bool Configuration::contains(const Atom& a) const {
  auto it = std::lower_bound(atoms_.begin(), atoms_.end(), a.time,
                             [](const Atom& x, double t) { return x.time < t; });
  return it != atoms_.end() && *it == a;
}

Configuration sample_configuration(const IntensityModel& model, Rng& rng) {
  const double T = model.horizon();
  const std::uint64_t n = rng.poisson(model.rate() * T);
  std::vector<Atom> atoms;
  atoms.reserve(n);
  for (std::uint64_t i = 0; i < n; ++i) {
    Atom a;
    a.time = T * rng.uniform_open();
    a.mark = model.sample_mark(rng);
    atoms.push_back(std::move(a));
  }
  const auto by_time = [](const Atom& a, const Atom& b) { return a.time < b.time; };
  std::sort(atoms.begin(), atoms.end(), by_time);
  // a repeated time has probability zero; redraw it rather than fail
  for (;;) {
    auto dup = std::adjacent_find(atoms.begin(), atoms.end(),
                                  [](const Atom& a, const Atom& b) { return a.time == b.time; });
    if (dup == atoms.end()) break;
    dup->time = T * rng.uniform_open();
    std::sort(atoms.begin(), atoms.end(), by_time);
  }
  return Configuration(T, model.dim(), std::move(atoms), model.label());
}

Configuration sample_configuration(const IntensityModel& model, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 0x636f6e66ULL);
  return sample_configuration(model, rng);
}

Configuration add_particle(const Configuration& cfg, const Atom& a) {
  if (a.mark.size() != cfg.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "add_particle: mark dimension mismatch");
  }
  if (!(a.time >= 0.0 && a.time <= cfg.horizon())) {
    throw Error(ErrorKind::Domain, "add_particle: time outside [0, T]");
  }
  const auto& atoms = cfg.atoms();
  auto it = std::lower_bound(atoms.begin(), atoms.end(), a.time,
                             [](const Atom& x, double t) { return x.time < t; });
  if (it != atoms.end() && it->time == a.time) {
    if (*it == a) return cfg;
    throw Error(ErrorKind::Domain, "add_particle: another atom already sits at this time");
  }
  std::vector<Atom> out;
  out.reserve(atoms.size() + 1);
  out.insert(out.end(), atoms.begin(), it);
  out.push_back(a);
  out.insert(out.end(), it, atoms.end());
  return Configuration(cfg.horizon(), cfg.dim(), std::move(out), cfg.intensity_ref());
}

Configuration remove_particle(const Configuration& cfg, const Atom& a) {
  const auto& atoms = cfg.atoms();
  auto it = std::lower_bound(atoms.begin(), atoms.end(), a.time,
                             [](const Atom& x, double t) { return x.time < t; });
  if (it == atoms.end() || !(*it == a)) return cfg;
  std::vector<Atom> out;
  out.reserve(atoms.size() - 1);
  out.insert(out.end(), atoms.begin(), it);
  out.insert(out.end(), it + 1, atoms.end());
  return Configuration(cfg.horizon(), cfg.dim(), std::move(out), cfg.intensity_ref());
}

MarkedConfiguration attach_marks(const Configuration& cfg, std::uint64_t seed) {
  Rng rng = Rng::stream(seed, 0x6d61726bULL);
  std::vector<double> marks(cfg.size());
  for (auto& r : marks) r = rng.uniform();
  return {cfg, std::move(marks)};
}

double integrate(const Configuration& cfg, const AtomFn& f) {
  double total = 0.0;
  for (const auto& a : cfg) total += f(a.time, a.mark);
  return total;
}

double compensated_integrate(const Configuration& cfg, const IntensityModel& model,
                             const MarkFn& f) {
  double total = 0.0;
  for (const auto& a : cfg) total += f(a.mark);
  return total - model.horizon() * model.sigma_integrate(f);
}

double compensated_integrate(const Configuration& cfg, const IntensityModel& model,
                             const AtomFn& f) {
  return integrate(cfg, f) - model.nu_integrate(f);
}

void write_configuration(std::ostream& out, const Configuration& cfg) {
  const auto old_precision = out.precision();
  out << std::setprecision(17);
  out << cfg.horizon() << ' ' << cfg.dim() << ' ' << cfg.size() << '\n';
  for (const auto& a : cfg) {
    out << a.time;
    for (Eigen::Index j = 0; j < a.mark.size(); ++j) out << ' ' << a.mark(j);
    out << '\n';
  }
  out.precision(old_precision);
}

Configuration read_configuration(std::istream& in) {
  double horizon = 0.0;
  long dim = 0;
  long n = -1;
  if (!(in >> horizon >> dim >> n) || dim < 1 || n < 0) {
    throw Error(ErrorKind::Parse, "configuration file: bad header, expected 'T d n'");
  }
  std::vector<Atom> atoms;
  atoms.reserve(static_cast<std::size_t>(n));
  for (long i = 0; i < n; ++i) {
    Atom a;
    a.mark.resize(dim);
    if (!(in >> a.time)) throw Error(ErrorKind::Parse, "configuration file: missing atom line");
    for (long j = 0; j < dim; ++j) {
      if (!(in >> a.mark(j))) throw Error(ErrorKind::Parse, "configuration file: short atom line");
    }
    if (!atoms.empty() && !(atoms.back().time < a.time)) {
      throw Error(ErrorKind::Parse, "configuration file: times must be strictly increasing (line " +
                                        std::to_string(i + 2) + ")");
    }
    atoms.push_back(std::move(a));
  }
  try {
    return Configuration(horizon, static_cast<int>(dim), std::move(atoms), "file");
  } catch (const Error& e) {
    throw Error(ErrorKind::Parse, std::string("configuration file: ") + e.what());
  }
}

void save_configuration(const std::string& path, const Configuration& cfg) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path);
  write_configuration(out, cfg);
}

Configuration load_configuration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot read " + path);
  return read_configuration(in);
}

}  // namespace lentp
