#include "lentp/registry.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace lentp {
namespace {

const std::vector<RegistryEntry> kModels = {
    {"power", "c x^{-1-a} on eps < |x| < 1",
     {{"T", "1", "horizon"},
      {"c", "0.5", "scale"},
      {"a", "0.5", "stability index"},
      {"epsilon", "0.05", "truncation level"},
      {"symmetric", "1", "mirror onto negative marks"},
      {"expected_count", "-", "rescale so that lambda T equals this"}}},
    {"polar", "dtheta drho / rho on eps < rho < 1, d = 2",
     {{"T", "1", "horizon"},
      {"epsilon", "0.1", "truncation level"},
      {"expected_count", "-", "rescale so that lambda T equals this"}}},
    {"curve", "power model carried onto the parabola (u, u^2), d = 2",
     {{"T", "1", "horizon"},
      {"c", "0.5", "scale"},
      {"a", "0.5", "stability index"},
      {"epsilon", "0.05", "truncation level"},
      {"symmetric", "1", "mirror onto negative marks"},
      {"expected_count", "-", "rescale so that lambda T equals this"}}},
    {"dyadic", "atoms at 2^{-n}, n_start <= n <= n_max (not diffuse)",
     {{"T", "1", "horizon"},
      {"n_max", "30", "last exponent"},
      {"n_start", "0", "first exponent"},
      {"expected_count", "-", "rescale so that lambda T equals this"}}},
    {"compound", "uniform intensity on the box [lo, hi]",
     {{"T", "1", "horizon"},
      {"lo", "[-1]", "lower corner"},
      {"hi", "[1]", "upper corner"},
      {"rate", "4", "total mass of sigma"},
      {"expected_count", "-", "rescale so that lambda T equals this"}}},
};

const std::vector<RegistryEntry> kFunctionals = {
    {"path_eval", "Y_t", {{"t", "1", "evaluation time"}}},
    {"doleans", "Doleans exponential at t, d = 1", {{"t", "1", "evaluation time"}}},
    {"pair_doleans", "(Y_t, Exp(Y)_t), d = 1", {{"t", "1", "evaluation time"}}},
    {"area", "(X_1, X_2, Levy area) at t, d = 2", {{"t", "1", "evaluation time"}}},
    {"time_integral", "int_0^t sin(Y_s) ds componentwise", {{"t", "1", "evaluation time"}}},
    {"gou", "generalised Ornstein-Uhlenbeck, d = 2",
     {{"t", "1", "evaluation time"}, {"x0", "1", "initial value"}}},
    {"sup", "sup_{s <= t} (Y_s + K_s), d = 1",
     {{"t", "1", "evaluation time"},
      {"k_breaks", "[]", "jump times of K"},
      {"k_values", "[0]", "values of K, one more than breaks"}}},
    {"nearest", "distance of the closest mark to the origin", {}},
    {"jump_sde", "triangular three-dimensional jump SDE (Euler), d = 2",
     {{"t", "1", "evaluation time"},
      {"z0", "[0, 0, 0]", "initial state"},
      {"delta", "0.01", "Euler step"}}},
    {"constant", "constant vector", {{"value", "[1]", "the constant"}}},
};

const std::vector<RegistryEntry> kGammas = {
    {"diag_x2", "alpha(x) = diag(x_i^2)", {}},
    {"identity", "alpha(x) = I", {}},
    {"polar", "alpha(x) = |x|^2 I", {}},
    {"curve", "(1, 2u)(1, 2u)^T u^2 on the parabola, d = 2", {}},
};

const std::vector<ParamDoc> kCommonExperiment = {
    {"kind", "-", "experiment kind"},
    {"seed", "1", "base seed (overridden by --seed)"},
    {"nsamples", "1000", "outer Monte Carlo size"},
};

const std::vector<RegistryEntry> kExperiments = {
    {"gamma", "carre du champ matrix of the functional on one configuration",
     {{"configuration", "two_atom", "two_atom | random | path to a configuration file"},
      {"mode", "closed", "closed | fd"}}},
    {"survey", "det Gamma positivity frequency over sampled configurations",
     {{"tol", "1e-12", "relative determinant threshold"},
      {"min_frequency", "0", "pass threshold"}}},
    {"identity", "measure identities (Laplace, duality, marked moments, suite)",
     {{"checks", "[laplace]", "laplace | duality | marked_moment | mark_identities | suite"},
      {"probe", "zero", "laplace probe: zero | linear | sine"},
      {"n_inner", "8", "inner samples"}}},
    {"chaos", "exponential series, product formula and orthogonality",
     {{"max_degree", "2", "orthogonality grid size"},
      {"n_max", "12", "series truncation"}}},
    {"density", "kernel density and empirical characteristic function",
     {{"bandwidth", "0", "0 selects Silverman"},
      {"u_grid", "[0.5, 1, 2, 4, 8]", "ECF frequencies"}}},
    {"rajchman", "characteristic function of a continuous non-Rajchman law",
     {{"n_max", "30", "last dyadic exponent"},
      {"k_max", "8", "frequencies 2^k pi, k <= k_max"}}},
};

const std::vector<std::string> kRegistryNames = {"models", "functionals", "gammas", "experiments"};

const RegistryEntry& find_entry(const std::vector<RegistryEntry>& entries, const std::string& label,
                                const std::string& registry) {
  const auto it = std::find_if(entries.begin(), entries.end(),
                               [&](const RegistryEntry& e) { return e.label == label; });
  if (it == entries.end()) {
    throw Error(ErrorKind::Registry, "unknown " + registry + " label '" + label + "'");
  }
  return *it;
}

std::vector<std::string> allowed_keys(const RegistryEntry& entry, std::vector<std::string> base) {
  for (const auto& p : entry.params) base.push_back(p.name);
  return base;
}

Vector to_vector(const std::vector<double>& xs) {
  return Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

IntensityModel power_base(const RunConfig& cfg) {
  return power_truncated(cfg.number("model", "T", 1.0), cfg.number("model", "c", 0.5),
                         cfg.number("model", "a", 0.5), cfg.number("model", "epsilon", 0.05),
                         cfg.number("model", "symmetric", 1.0) != 0.0);
}

}  // namespace

const std::vector<RegistryEntry>& registry_entries(const std::string& registry) {
  if (registry == "models") return kModels;
  if (registry == "functionals") return kFunctionals;
  if (registry == "gammas") return kGammas;
  if (registry == "experiments") return kExperiments;
  throw Error(ErrorKind::Registry, "unknown registry '" + registry + "'");
}

std::vector<std::string> registry_names() { return kRegistryNames; }

void validate_config(const RunConfig& cfg) {
  for (const auto& [name, section] : cfg.sections()) {
    if (name != "model" && name != "functional" && name != "gamma" && name != "experiment") {
      const auto& v = section.empty() ? ConfigValue{} : section.begin()->second;
      throw Error(ErrorKind::Parse, std::to_string(v.line) + ":1: unknown section [" + name + "]");
    }
  }
  if (cfg.has_section("model")) {
    const auto& e = find_entry(kModels, cfg.word("model", "family"), "model");
    cfg.require_keys("model", allowed_keys(e, {"family"}));
  }
  if (cfg.has_section("functional")) {
    const auto& e = find_entry(kFunctionals, cfg.word("functional", "label"), "functional");
    cfg.require_keys("functional", allowed_keys(e, {"label"}));
  }
  if (cfg.has_section("gamma")) {
    find_entry(kGammas, cfg.word("gamma", "spec"), "gamma");
    cfg.require_keys("gamma", {"spec"});
  }
  std::vector<std::string> base;
  for (const auto& p : kCommonExperiment) base.push_back(p.name);
  const auto& e = find_entry(kExperiments, cfg.word("experiment", "kind"), "experiment");
  cfg.require_keys("experiment", allowed_keys(e, base));
}

IntensityModel build_model(const RunConfig& cfg) {
  const std::string family = cfg.word("model", "family");
  find_entry(kModels, family, "model");
  const double horizon = cfg.number("model", "T", 1.0);
  IntensityModel model = [&]() -> IntensityModel {
    if (family == "power") return power_base(cfg);
    if (family == "polar") return polar(horizon, cfg.number("model", "epsilon", 0.1));
    if (family == "curve") {
      return curve_image(power_base(cfg),
                         [](double u) {
                           Vector x(2);
                           x << u, u * u;
                           return x;
                         },
                         2);
    }
    if (family == "dyadic") {
      return atomic_dyadic(horizon, static_cast<int>(cfg.number("model", "n_max", 30)),
                           static_cast<int>(cfg.number("model", "n_start", 0)));
    }
    const Vector lo = to_vector(cfg.numbers("model", "lo", {-1.0}));
    const Vector hi = to_vector(cfg.numbers("model", "hi", {1.0}));
    if (lo.size() != hi.size()) {
      throw Error(ErrorKind::InvalidModel, "compound: lo and hi differ in length");
    }
    const double volume = (hi - lo).prod();
    const double level = cfg.number("model", "rate", 4.0) / volume;
    return compound_poisson(horizon, lo, hi, [level](const Vector&) { return level; }, level);
  }();
  if (cfg.has("model", "expected_count")) {
    model = with_expected_count(model, cfg.number("model", "expected_count"));
  }
  return model;
}

Functional build_functional(const RunConfig& cfg, const IntensityModel& model) {
  const std::string label = cfg.word("functional", "label");
  find_entry(kFunctionals, label, "functional");
  const double t = cfg.number("functional", "t", model.horizon());
  if (label == "path_eval") return make_path_eval(model, t);
  if (label == "doleans") return make_doleans(model, t);
  if (label == "pair_doleans") return make_pair_doleans(model, t);
  if (label == "area") return make_stochastic_area(model, t);
  if (label == "time_integral") {
    VectorMap g;
    g.value = [](const Vector& y) { return y.array().sin().matrix().eval(); };
    g.jacobian = [](const Vector& y) { return Matrix(y.array().cos().matrix().asDiagonal()); };
    return make_time_integral(model, g, t);
  }
  if (label == "gou") return make_generalized_ou(model, cfg.number("functional", "x0", 1.0), t);
  if (label == "sup") {
    PiecewiseConstant k;
    k.breaks = cfg.numbers("functional", "k_breaks", {});
    k.values = cfg.numbers("functional", "k_values", {0.0});
    return make_running_sup(model, t, k);
  }
  if (label == "nearest") return make_nearest_point(model);
  if (label == "jump_sde") {
    return make_triangular_sde(model, to_vector(cfg.numbers("functional", "z0", {0.0, 0.0, 0.0})), t,
                         cfg.number("functional", "delta", 0.01));
  }
  return make_constant(to_vector(cfg.numbers("functional", "value", {1.0})), model.dim());
}

GammaSpec build_gamma(const RunConfig& cfg, int dim) {
  const std::string label = cfg.word("gamma", "spec", "diag_x2");
  find_entry(kGammas, label, "gamma");
  if (label == "diag_x2") return gamma_diag_x2(dim);
  if (label == "identity") return gamma_identity(dim);
  if (label == "polar") return gamma_polar(dim);
  if (dim != 2) throw Error(ErrorKind::DimensionMismatch, "curve gamma needs d = 2");
  return gamma_parabola();
}

}  // namespace lentp
