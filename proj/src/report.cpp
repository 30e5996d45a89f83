#include "lentp/report.hpp"

#include <cmath>

namespace lentp {

MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe out;
  out.n = xs.size();
  if (xs.empty()) return out;
  double sum = 0.0;
  for (double x : xs) sum += x;
  out.mean = sum / static_cast<double>(xs.size());
  if (xs.size() < 2) return out;
  double ss = 0.0;
  for (double x : xs) ss += (x - out.mean) * (x - out.mean);
  const double n = static_cast<double>(xs.size());
  out.se = std::sqrt(ss / (n - 1.0) / n);
  return out;
}

EstimatorReport statistical_report(std::string name, double estimate, double reference,
                                   double se, std::size_t n) {
  EstimatorReport r = statistical_report(std::move(name), std::complex<double>(estimate),
                                         std::complex<double>(reference), se, n);
  r.complex_valued = false;
  return r;
}

EstimatorReport statistical_report(std::string name, std::complex<double> estimate,
                                   std::complex<double> reference, double se, std::size_t n) {
  EstimatorReport r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.reference = reference;
  r.standard_error = se;
  r.nsamples = n;
  r.complex_valued = true;
  r.pass = r.gap() <= kSeMultiplier * se;
  return r;
}

EstimatorReport deterministic_report(std::string name, double estimate, double reference,
                                     double tolerance) {
  EstimatorReport r;
  r.name = std::move(name);
  r.estimate = estimate;
  r.reference = reference;
  r.deterministic = true;
  r.tolerance = tolerance;
  r.pass = r.gap() <= tolerance;
  return r;
}

nlohmann::ordered_json to_json(const EstimatorReport& r) {
  nlohmann::ordered_json j;
  j["identity"] = r.name;
  if (r.complex_valued) {
    j["estimate"] = {r.estimate.real(), r.estimate.imag()};
    j["reference"] = {r.reference.real(), r.reference.imag()};
  } else {
    j["estimate"] = r.estimate.real();
    j["reference"] = r.reference.real();
  }
  if (r.deterministic) {
    j["tolerance"] = r.tolerance;
  } else {
    j["se"] = r.standard_error;
  }
  j["n"] = r.nsamples;
  j["pass"] = r.pass;
  return j;
}

}  // namespace lentp
