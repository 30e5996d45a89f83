#include "lentp/lent_particle.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "lentp/parallel.hpp"

namespace lentp {
namespace {

constexpr double kDefaultDetTol = 1e-12;

void check_compatible(const Functional& f, const Configuration& cfg, const GammaSpec& spec) {
  if (f.mark_dim != cfg.dim() || spec.dim != cfg.dim()) {
    throw Error(ErrorKind::DimensionMismatch,
                "carre_du_champ: functional, configuration and gamma dimensions differ");
  }
}

bool nondegenerate(const Matrix& g, double tol) {
  const auto m = static_cast<double>(g.rows());
  const double trace = g.trace();
  if (!(trace > 0.0)) return false;
  return g.determinant() > tol * std::pow(trace / m, m);
}

}  // namespace

CarreDuChamp carre_du_champ(const Functional& f, const Configuration& cfg, const GammaSpec& spec,
                            DerivativeMode mode) {
  check_compatible(f, cfg, spec);
  CarreDuChamp out;
  out.matrix = Matrix::Zero(f.out_dim, f.out_dim);
  out.contributions.reserve(cfg.size());
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const Atom& a = cfg[i];
    const Matrix d = add_derivative(f, remove_particle(cfg, a), a.time, a.mark, mode);
    if (!d.allFinite()) {
      out.flagged_atoms.push_back(i);
      out.contributions.push_back(Matrix::Zero(f.out_dim, f.out_dim));
      continue;
    }
    Matrix c = d * spec.alpha(a.mark) * d.transpose();
    c = 0.5 * (c + c.transpose()).eval();
    out.matrix += c;
    out.contributions.push_back(std::move(c));
  }
  return out;
}

Vector sharp_sample(const Functional& f, const MarkedConfiguration& mcfg, const GammaSpec& spec,
                    DerivativeMode mode) {
  const Configuration& cfg = mcfg.base;
  check_compatible(f, cfg, spec);
  if (mcfg.aux_marks.size() != cfg.size()) {
    throw Error(ErrorKind::DimensionMismatch, "sharp_sample: one auxiliary mark per atom");
  }
  Vector out = Vector::Zero(f.out_dim);
  for (std::size_t i = 0; i < cfg.size(); ++i) {
    const Atom& a = cfg[i];
    const Matrix d = add_derivative(f, remove_particle(cfg, a), a.time, a.mark, mode);
    out += d * (spec.chol(a.mark) * spec.basis_vector(mcfg.aux_marks[i]));
  }
  return out;
}

SharpMoments sharp_moments(const Functional& f, const Configuration& cfg, const GammaSpec& spec,
                           std::size_t nsamples, std::uint64_t seed, int jobs) {
  check_compatible(f, cfg, spec);
  const int m = f.out_dim;
  // The per-atom factors D(a) L(x_a) do not depend on the auxiliary marks.
  std::vector<Matrix> factors;
  factors.reserve(cfg.size());
  for (const auto& a : cfg) {
    factors.push_back(add_derivative(f, remove_particle(cfg, a), a.time, a.mark,
                                     DerivativeMode::Closed) *
                      spec.chol(a.mark));
  }
  auto draws = parallel_map<Vector>(nsamples, jobs, [&](std::size_t s) {
    Rng rng = Rng::stream(seed, 0x7368617270, s);
    Vector v = Vector::Zero(m);
    for (const auto& fac : factors) v += fac * spec.basis_vector(rng.uniform());
    return v;
  });
  SharpMoments out;
  out.nsamples = nsamples;
  const double n = static_cast<double>(nsamples);
  out.mean = Vector::Zero(m);
  out.second = Matrix::Zero(m, m);
  for (const auto& v : draws) {
    out.mean += v;
    out.second += v * v.transpose();
  }
  out.mean /= n;
  out.second /= n;
  Vector mean_sq = Vector::Zero(m);
  Matrix second_sq = Matrix::Zero(m, m);
  for (const auto& v : draws) {
    mean_sq += (v - out.mean).array().square().matrix();
    second_sq += ((v * v.transpose()) - out.second).array().square().matrix();
  }
  const double denom = n > 1 ? n - 1 : 1;
  out.mean_se = (mean_sq / denom / n).array().sqrt().matrix();
  out.second_se = (second_sq / denom / n).array().sqrt().matrix();
  return out;
}

ChainRuleResult chain_rule_check(const SmoothMap& phi, const std::vector<Functional>& fs,
                                 const Configuration& cfg, const GammaSpec& spec,
                                 DerivativeMode mode) {
  const Functional joint = stack(fs);
  const Functional composed = compose(phi, joint);
  ChainRuleResult out;
  out.lhs = carre_du_champ(composed, cfg, spec, mode).matrix(0, 0);
  const Vector grad = phi.gradient(joint.value(cfg));
  out.rhs = grad.dot(carre_du_champ(joint, cfg, spec, mode).matrix * grad);
  out.residual = std::abs(out.lhs - out.rhs);
  return out;
}

SurveyResult det_positivity_survey(const Functional& f, const IntensityModel& model,
                                   const GammaSpec& spec, std::size_t nsamples, double tol,
                                   std::uint64_t seed, int jobs) {
  if (nsamples == 0) throw Error(ErrorKind::Domain, "det_positivity_survey: nsamples >= 1");
  SurveyResult out;
  out.tol = tol > 0.0 ? tol : kDefaultDetTol;
  out.rows = parallel_map<SurveyRow>(nsamples, jobs, [&](std::size_t i) {
    SurveyRow row;
    row.seed = mix64(seed ^ mix64(i + 1));
    const Configuration cfg = sample_configuration(model, row.seed);
    const CarreDuChamp g = carre_du_champ(f, cfg, spec);
    row.n_atoms = cfg.size();
    row.det = g.matrix.determinant();
    row.trace = g.matrix.trace();
    row.min_eig = g.matrix.rows() == 0
                      ? 0.0
                      : Eigen::SelfAdjointEigenSolver<Matrix>(g.matrix, Eigen::EigenvaluesOnly)
                            .eigenvalues()(0);
    std::size_t good = 0;
    for (const auto& c : g.contributions) good += nondegenerate(c, out.tol) ? 1 : 0;
    row.simplified_fraction =
        cfg.empty() ? 0.0 : static_cast<double>(good) / static_cast<double>(cfg.size());
    return row;
  });
  std::size_t hits = 0;
  for (const auto& row : out.rows) {
    const double m = static_cast<double>(f.out_dim);
    if (row.trace > 0.0 && row.det > out.tol * std::pow(row.trace / m, m)) ++hits;
  }
  out.frequency = static_cast<double>(hits) / static_cast<double>(nsamples);
  return out;
}

void write_survey_csv(std::ostream& out, const SurveyResult& survey) {
  out << "seed,n_atoms,det,trace,min_eig,simplified_criterion_fraction\n";
  out << std::setprecision(17);
  for (const auto& r : survey.rows) {
    out << r.seed << ',' << r.n_atoms << ',' << r.det << ',' << r.trace << ',' << r.min_eig
        << ',' << r.simplified_fraction << '\n';
  }
}

}  // namespace lentp
