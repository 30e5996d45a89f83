#ifndef LENTP_REPORT_HPP
#define LENTP_REPORT_HPP

#include <complex>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

namespace lentp {

/// Sample mean with standard error sample_std / sqrt(n).
struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};
MeanSe mean_se(const std::vector<double>& xs);

// One verified identity. Statistical reports pass iff
// |estimate - reference| <= 4 se; deterministic ones iff the gap is <= tolerance.
struct EstimatorReport {
  std::string name;
  std::complex<double> estimate;
  std::complex<double> reference;
  double standard_error = 0.0;
  std::size_t nsamples = 0;
  bool complex_valued = false;
  bool deterministic = false;
  double tolerance = 0.0;
  bool pass = false;

  double gap() const { return std::abs(estimate - reference); }
};

inline constexpr double kSeMultiplier = 4.0;

EstimatorReport statistical_report(std::string name, double estimate, double reference,
                                   double se, std::size_t n);
EstimatorReport statistical_report(std::string name, std::complex<double> estimate,
                                   std::complex<double> reference, double se, std::size_t n);
EstimatorReport deterministic_report(std::string name, double estimate, double reference,
                                     double tolerance);

nlohmann::ordered_json to_json(const EstimatorReport& r);

}  // namespace lentp

#endif  // LENTP_REPORT_HPP
