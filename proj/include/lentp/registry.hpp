#ifndef LENTP_REGISTRY_HPP
#define LENTP_REGISTRY_HPP

#include <string>
#include <vector>

#include "lentp/functional.hpp"
#include "lentp/gamma_spec.hpp"
#include "lentp/intensity.hpp"
#include "lentp/run_config.hpp"

namespace lentp {

struct ParamDoc {
  std::string name;
  std::string fallback;
  std::string description;
};

struct RegistryEntry {
  std::string label;
  std::string summary;
  std::vector<ParamDoc> params;
};

/// Entries of "models", "functionals", "gammas" or "experiments" in listing order.
const std::vector<RegistryEntry>& registry_entries(const std::string& registry);

/// Registry names in listing order.
std::vector<std::string> registry_names();

/// Model from the [model] section.
IntensityModel build_model(const RunConfig& cfg);
/// Functional from the [functional] section.
Functional build_functional(const RunConfig& cfg, const IntensityModel& model);
/// GammaSpec from the [gamma] section (defaults to diag_x2).
GammaSpec build_gamma(const RunConfig& cfg, int dim);

/// Rejects unknown sections and keys, and unknown labels (Error(Registry)).
void validate_config(const RunConfig& cfg);

}  // namespace lentp

#endif  // LENTP_REGISTRY_HPP
