#ifndef LENTP_RUNNER_HPP
#define LENTP_RUNNER_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "lentp/configuration.hpp"

namespace lentp {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitPass = 0,
  kExitFail = 1,
  kExitParse = 2,
  kExitRegistry = 3,
  kExitError = 4,
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  int jobs = 1;
  std::string out_dir = ".";
};

struct RunResult {
  int exit_code = kExitPass;
  std::vector<std::string> artifacts;
};

/// Parses, validates and executes one run configuration. Artifacts go to
/// options.out_dir; the summary table goes to `out`, diagnostics to `err`.
RunResult run_config_text(const std::string& text, const RunOptions& options, std::ostream& out,
                          std::ostream& err);
RunResult run_config_file(const std::string& path, const RunOptions& options, std::ostream& out,
                          std::ostream& err);

/// Prints labels and parameter schemas of a registry.
int list_registry(const std::string& registry, std::ostream& out, std::ostream& err);

/// The two-atom one-dimensional configuration {(0.2, 0.5), (0.6, -0.2)} on [0, 1].
Configuration two_atom_fixture();

/// Writes the fixture configurations and a matching run configuration.
int write_fixtures(const std::string& out_dir, std::ostream& out);

}  // namespace lentp

#endif  // LENTP_RUNNER_HPP
