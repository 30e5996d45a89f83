#ifndef LENTP_LENT_PARTICLE_HPP
#define LENTP_LENT_PARTICLE_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "lentp/configuration.hpp"
#include "lentp/functional.hpp"
#include "lentp/gamma_spec.hpp"

namespace lentp {

// Gamma[F, F^T] = sum over atoms a of D(a) alpha(x_a) D(a)^T, where
// D(a) is the added-particle derivative of F on the configuration with a
// removed. matrix == sum of contributions; each contribution is PSD.
struct CarreDuChamp {
  Matrix matrix;
  std::vector<Matrix> contributions;
  /// Indices of atoms whose derivative was not finite; excluded from matrix.
  std::vector<std::size_t> flagged_atoms;
};

CarreDuChamp carre_du_champ(const Functional& f, const Configuration& cfg, const GammaSpec& spec,
                            DerivativeMode mode = DerivativeMode::Closed);

/// F_sharp = sum_a D(a) L(x_a) eta(r_a); its mark-conditional second moment is Gamma.
Vector sharp_sample(const Functional& f, const MarkedConfiguration& mcfg, const GammaSpec& spec,
                    DerivativeMode mode = DerivativeMode::Closed);

/// Mark-seed Monte Carlo of F_sharp on a fixed configuration.
struct SharpMoments {
  Vector mean;
  Vector mean_se;
  Matrix second;
  Matrix second_se;
  std::size_t nsamples = 0;
};
SharpMoments sharp_moments(const Functional& f, const Configuration& cfg, const GammaSpec& spec,
                           std::size_t nsamples, std::uint64_t seed, int jobs = 1);

struct ChainRuleResult {
  double lhs = 0.0;  // Gamma[phi(F)]
  double rhs = 0.0;  // sum_ij phi_i phi_j Gamma[F_i, F_j]
  double residual = 0.0;
};
ChainRuleResult chain_rule_check(const SmoothMap& phi, const std::vector<Functional>& fs,
                                 const Configuration& cfg, const GammaSpec& spec,
                                 DerivativeMode mode = DerivativeMode::Closed);

struct SurveyRow {
  std::uint64_t seed = 0;
  std::size_t n_atoms = 0;
  double det = 0.0;
  double trace = 0.0;
  double min_eig = 0.0;
  double simplified_fraction = 0.0;
};

struct SurveyResult {
  double frequency = 0.0;
  double tol = 0.0;
  std::vector<SurveyRow> rows;
};

/// det Gamma > tol * (trace / m)^m counts as nondegenerate; tol <= 0 selects 1e-12.
SurveyResult det_positivity_survey(const Functional& f, const IntensityModel& model,
                                   const GammaSpec& spec, std::size_t nsamples, double tol,
                                   std::uint64_t seed, int jobs = 1);

void write_survey_csv(std::ostream& out, const SurveyResult& survey);

}  // namespace lentp

#endif  // LENTP_LENT_PARTICLE_HPP
