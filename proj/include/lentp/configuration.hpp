#ifndef LENTP_CONFIGURATION_HPP
#define LENTP_CONFIGURATION_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lentp/intensity.hpp"
#include "lentp/types.hpp"

namespace lentp {

/// A jump: time in [0, T] and a nonzero mark in R^d.
struct Atom {
  double time = 0.0;
  Vector mark;
};

/// Exact equality of stored (time, mark).
bool operator==(const Atom& a, const Atom& b);

// A finite configuration sum_i delta_{(t_i, x_i)} on [0, T] x R^d. Atoms are
// kept sorted by strictly increasing time; every operation returns a new
// configuration.
class Configuration {
 public:
  Configuration(double horizon, int dim, std::vector<Atom> atoms = {},
                std::string intensity_ref = "manual");

  /// Sorts the atoms first; still rejects repeated times.
  static Configuration from_unsorted(double horizon, int dim, std::vector<Atom> atoms,
                                     std::string intensity_ref = "manual");

  double horizon() const { return horizon_; }
  int dim() const { return dim_; }
  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }
  const std::string& intensity_ref() const { return intensity_ref_; }

  auto begin() const { return atoms_.begin(); }
  auto end() const { return atoms_.end(); }
  const Atom& operator[](std::size_t i) const { return atoms_[i]; }

  bool contains(const Atom& a) const;

  friend bool operator==(const Configuration& a, const Configuration& b) {
    return a.horizon_ == b.horizon_ && a.dim_ == b.dim_ && a.atoms_ == b.atoms_;
  }

 private:
  double horizon_;
  int dim_;
  std::vector<Atom> atoms_;
  std::string intensity_ref_;
};

/// A configuration whose atoms carry i.i.d. uniform auxiliary marks r_i.
struct MarkedConfiguration {
  Configuration base;
  std::vector<double> aux_marks;
};

Configuration sample_configuration(const IntensityModel& model, Rng& rng);
Configuration sample_configuration(const IntensityModel& model, std::uint64_t seed);

/// epsilon^+: inserts `a` unless an identical atom is already present.
Configuration add_particle(const Configuration& cfg, const Atom& a);
/// epsilon^-: removes `a` if present.
Configuration remove_particle(const Configuration& cfg, const Atom& a);

MarkedConfiguration attach_marks(const Configuration& cfg, std::uint64_t seed);

/// N(f).
double integrate(const Configuration& cfg, const AtomFn& f);
/// N(f) - nu(f) for time-homogeneous f.
double compensated_integrate(const Configuration& cfg, const IntensityModel& model,
                             const MarkFn& f);
/// N(f) - nu(f) with product quadrature over [0, T].
double compensated_integrate(const Configuration& cfg, const IntensityModel& model,
                             const AtomFn& f);

// Line format: "T d n" followed by n lines "time mark_1 ... mark_d", all
// written with 17 significant digits.
void write_configuration(std::ostream& out, const Configuration& cfg);
Configuration read_configuration(std::istream& in);
void save_configuration(const std::string& path, const Configuration& cfg);
Configuration load_configuration(const std::string& path);

}  // namespace lentp

#endif  // LENTP_CONFIGURATION_HPP
