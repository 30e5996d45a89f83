#include "lentp/runner.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "lentp/chaos.hpp"
#include "lentp/diagnostics.hpp"
#include "lentp/lent_particle.hpp"
#include "lentp/parallel.hpp"
#include "lentp/registry.hpp"

namespace lentp {
namespace {

using Json = nlohmann::ordered_json;

constexpr double kSuitePassFraction = 0.95;
constexpr double kSeriesTolerance = 1e-8;
constexpr double kProductTolerance = 1e-10;
constexpr double kKdeMassTolerance = 1e-3;
constexpr double kRajchmanTolerance = 0.002;

struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;

  Json json() const { return Json{{"config_hash", config_hash}, {"seed", seed}, {"version", kVersion}}; }
  void csv_header(std::ostream& out) const {
    out << "# config_hash=" << config_hash << ",seed=" << seed << ",version=" << kVersion << '\n';
  }
};

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << "0x" << std::hex << std::setw(16) << std::setfill('0') << v;
  return s.str();
}

Json matrix_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

class Context {
 public:
  Context(const RunConfig& cfg, const RunOptions& options, std::uint64_t seed,
          std::string hash, std::ostream& out)
      : cfg_(cfg), options_(options), prov_{std::move(hash), seed}, out_(out) {}

  const RunConfig& cfg() const { return cfg_; }
  std::uint64_t seed() const { return prov_.seed; }
  int jobs() const { return options_.jobs; }
  std::ostream& out() { return out_; }
  std::size_t nsamples(double fallback) const {
    const double n = cfg_.number("experiment", "nsamples", fallback);
    if (!(n >= 1.0)) throw Error(ErrorKind::Domain, "nsamples must be >= 1");
    return static_cast<std::size_t>(n);
  }

  void write_json(const std::string& name, Json body) {
    Json doc;
    doc["provenance"] = prov_.json();
    for (auto& [k, v] : body.items()) doc[k] = v;
    write(name, doc.dump(2) + "\n");
  }
  template <typename Fn>
  void write_csv(const std::string& name, Fn&& body) {
    std::ostringstream s;
    prov_.csv_header(s);
    body(s);
    write(name, s.str());
  }
  std::vector<std::string> artifacts;

 private:
  void write(const std::string& name, const std::string& content) {
    std::filesystem::create_directories(options_.out_dir);
    const std::string path = (std::filesystem::path(options_.out_dir) / name).string();
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::Io, "cannot write " + path);
    f << content;
    artifacts.push_back(path);
  }

  const RunConfig& cfg_;
  const RunOptions& options_;
  Provenance prov_;
  std::ostream& out_;
};

void print_reports(std::ostream& out, const std::vector<EstimatorReport>& reports) {
  out << std::left << std::setw(44) << "identity" << std::setw(16) << "estimate" << std::setw(16)
      << "reference" << std::setw(12) << "se/tol" << "pass\n";
  for (const auto& r : reports) {
    out << std::left << std::setw(44) << r.name << std::setw(16) << std::abs(r.estimate)
        << std::setw(16) << std::abs(r.reference) << std::setw(12)
        << (r.deterministic ? r.tolerance : r.standard_error) << (r.pass ? "yes" : "NO") << '\n';
  }
}

Json reports_json(const std::vector<EstimatorReport>& reports) {
  Json arr = Json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return arr;
}

Configuration experiment_configuration(Context& ctx, const IntensityModel& model) {
  const std::string which = ctx.cfg().word("experiment", "configuration", "two_atom");
  if (which == "two_atom") return two_atom_fixture();
  if (which == "random") return sample_configuration(model, ctx.seed());
  return load_configuration(which);
}

bool run_gamma(Context& ctx) {
  const IntensityModel model = build_model(ctx.cfg());
  const Functional f = build_functional(ctx.cfg(), model);
  const GammaSpec spec = build_gamma(ctx.cfg(), model.dim());
  const Configuration cfg = experiment_configuration(ctx, model);
  const std::string mode_name = ctx.cfg().word("experiment", "mode", "closed");
  if (mode_name != "closed" && mode_name != "fd") {
    throw Error(ErrorKind::Registry, "unknown derivative mode '" + mode_name + "'");
  }
  const DerivativeMode mode = mode_name == "fd" ? DerivativeMode::FiniteDifference : DerivativeMode::Closed;
  const CarreDuChamp g = carre_du_champ(f, cfg, spec, mode);
  const double det = g.matrix.determinant();
  double min_eig = 0.0;
  if (g.matrix.size() > 0) {
    min_eig = Eigen::SelfAdjointEigenSolver<Matrix>(g.matrix, Eigen::EigenvaluesOnly).eigenvalues()(0);
  }
  const bool pass = g.flagged_atoms.empty() && min_eig >= -1e-10 * std::max(1.0, g.matrix.trace());
  auto& out = ctx.out();
  out << "functional " << f.label << ", gamma " << spec.label << ", " << cfg.size() << " atoms\n";
  out << "Gamma =\n" << std::setprecision(12) << g.matrix << "\ndet = " << det << '\n';
  ctx.write_json("gamma.json", Json{{"functional", f.label},
                                    {"gamma", spec.label},
                                    {"mode", mode_name},
                                    {"n_atoms", cfg.size()},
                                    {"matrix", matrix_json(g.matrix)},
                                    {"det", det},
                                    {"min_eig", min_eig},
                                    {"flagged_atoms", g.flagged_atoms},
                                    {"pass", pass}});
  return pass;
}

bool run_survey(Context& ctx) {
  const IntensityModel model = build_model(ctx.cfg());
  const Functional f = build_functional(ctx.cfg(), model);
  const GammaSpec spec = build_gamma(ctx.cfg(), model.dim());
  const std::size_t n = ctx.nsamples(1000);
  const SurveyResult s = det_positivity_survey(f, model, spec, n, ctx.cfg().number("experiment", "tol", 0.0),
                                               ctx.seed(), ctx.jobs());
  const double threshold = ctx.cfg().number("experiment", "min_frequency", 0.0);
  const bool pass = s.frequency >= threshold;
  ctx.out() << "det Gamma > tol (trace/m)^m in " << s.frequency << " of " << n
            << " configurations (tol " << s.tol << ")\n";
  ctx.write_csv("survey.csv", [&](std::ostream& o) { write_survey_csv(o, s); });
  ctx.write_json("survey.json", Json{{"functional", f.label},
                                     {"nsamples", n},
                                     {"tol", s.tol},
                                     {"frequency", s.frequency},
                                     {"min_frequency", threshold},
                                     {"pass", pass}});
  return pass;
}

bool run_identity(Context& ctx) {
  const IntensityModel model = build_model(ctx.cfg());
  const std::size_t n = ctx.nsamples(10000);
  const auto n_inner = static_cast<std::size_t>(ctx.cfg().number("experiment", "n_inner", 8));
  const auto checks = ctx.cfg().words("experiment", "checks", {"laplace"});
  const std::string probe = ctx.cfg().word("experiment", "probe", "zero");
  MarkFn f;
  if (probe == "zero") f = [](const Vector&) { return 0.0; };
  else if (probe == "linear") f = [](const Vector& x) { return 0.3 * x(0); };
  else if (probe == "sine") f = [](const Vector& x) { return 2.0 * std::sin(3.0 * x(0)); };
  else throw Error(ErrorKind::Registry, "unknown laplace probe '" + probe + "'");
  std::vector<EstimatorReport> reports;
  std::vector<EstimatorReport> suite;
  std::uint64_t stream = 0;
  auto next_seed = [&] { return mix64(ctx.seed() ^ mix64(++stream)); };
  const MarkFn sq = [](const Vector& x) { return x.squaredNorm(); };
  for (const auto& check : checks) {
    if (check == "laplace") {
      reports.push_back(laplace_check(model, f, n, next_seed(), ctx.jobs()));
    } else if (check == "duality") {
      auto p = duality_check(model, [&](const Configuration& c) {
        double s = 0.0;
        for (const auto& a : c) s += sq(a.mark);
        return std::exp(-s);
      }, sq, n, next_seed(), ctx.jobs());
      reports.push_back(p.first);
      reports.push_back(p.second);
    } else if (check == "marked_moment") {
      MarkedIntegrand m{
          [](const Configuration&, const Atom& a, double r) { return a.mark(0) * (r - 0.5); },
          [](const Configuration&, const Atom&) { return 0.0; },
          [](const Configuration&, const Atom& a) { return a.mark(0) * a.mark(0) / 12.0; }};
      reports.push_back(marked_moment_check(model, m, n, next_seed(), ctx.jobs()));
    } else if (check == "mark_identities") {
      MarkedIntegrand m{
          [](const Configuration&, const Atom& a, double r) { return std::exp(-a.mark.squaredNorm() * r); },
          [](const Configuration&, const Atom& a) {
            const double s = a.mark.squaredNorm();
            return s == 0.0 ? 1.0 : -std::expm1(-s) / s;
          },
          nullptr};
      auto p = mark_identities_check(model, m, n, n_inner, next_seed(), ctx.jobs());
      reports.push_back(p.first);
      reports.push_back(p.second);
    } else if (check == "suite") {
      suite = statistical_suite(n, next_seed(), ctx.jobs());
    } else {
      throw Error(ErrorKind::Registry, "unknown identity check '" + check + "'");
    }
  }
  bool pass = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  Json body{{"reports", reports_json(reports)}};
  print_reports(ctx.out(), reports);
  if (!suite.empty()) {
    const auto passed = std::count_if(suite.begin(), suite.end(), [](const auto& r) { return r.pass; });
    const double fraction = static_cast<double>(passed) / static_cast<double>(suite.size());
    print_reports(ctx.out(), suite);
    ctx.out() << "suite: " << passed << "/" << suite.size() << " within 4 SE\n";
    body["suite"] = reports_json(suite);
    body["suite_pass_fraction"] = fraction;
    pass = pass && fraction >= kSuitePassFraction;
  }
  body["pass"] = pass;
  ctx.write_json("identity.json", body);
  return pass;
}

bool run_chaos(Context& ctx) {
  const IntensityModel model = build_model(ctx.cfg());
  const std::size_t n = ctx.nsamples(100);
  const int n_max = static_cast<int>(ctx.cfg().number("experiment", "n_max", 12));
  const int max_degree = static_cast<int>(ctx.cfg().number("experiment", "max_degree", 2));
  const MarkFunction u{[](const Vector& x) { return 0.3 * std::tanh(x(0)); }, nullptr, 0.3};
  const MarkFunction v{[](const Vector& x) { return 0.3 * std::cos(x(0)); }, nullptr, 0.3};
  const double nu_u = model.horizon() * model.sigma_integrate(u.value);
  struct Row {
    std::size_t atoms;
    double series, bound, product;
  };
  const auto rows = parallel_map<Row>(n, ctx.jobs(), [&](std::size_t i) {
    const Configuration cfg = sample_configuration(model, mix64(ctx.seed() ^ mix64(i + 1)));
    const SeriesCheck s = exp_series_check(cfg, u, nu_u, 0.2, n_max);
    return Row{cfg.size(), s.residual, s.bound, product_formula_check(cfg, model, u, v, 0.2, 0.2)};
  });
  double worst_series = 0.0;
  double worst_product = 0.0;
  for (const auto& r : rows) {
    worst_series = std::max(worst_series, r.series);
    worst_product = std::max(worst_product, r.product);
  }
  std::vector<EstimatorReport> reports{
      deterministic_report("exp_series_max_residual", worst_series, 0.0, kSeriesTolerance),
      deterministic_report("product_formula_max_relative", worst_product, 0.0, kProductTolerance)};
  std::uint64_t stream = 0;
  for (int m = 1; m <= max_degree; ++m) {
    for (int k = 1; k <= max_degree; ++k) {
      reports.push_back(orthogonality_mc(model, u, v, m, k, n, mix64(ctx.seed() + ++stream), ctx.jobs()));
    }
  }
  print_reports(ctx.out(), reports);
  ctx.write_csv("chaos.csv", [&](std::ostream& o) {
    o << "sample,n_atoms,exp_series_residual,exp_series_bound,product_relative_residual\n"
      << std::setprecision(17);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      o << i << ',' << rows[i].atoms << ',' << rows[i].series << ',' << rows[i].bound << ','
        << rows[i].product << '\n';
    }
  });
  const bool pass = std::all_of(reports.begin(), reports.end(), [](const auto& r) { return r.pass; });
  ctx.write_json("chaos.json", Json{{"reports", reports_json(reports)}, {"pass", pass}});
  return pass;
}

bool run_density(Context& ctx) {
  const IntensityModel model = build_model(ctx.cfg());
  const Functional f = build_functional(ctx.cfg(), model);
  const std::size_t n = ctx.nsamples(10000);
  const auto samples = sample_functional(f, model, n, ctx.seed(), ctx.jobs());
  const KdeResult k = kde(samples, ctx.cfg().number("experiment", "bandwidth", 0.0));
  ctx.write_csv("density.csv", [&](std::ostream& o) { write_kde_csv(o, k); });
  Json body{{"functional", f.label}, {"nsamples", n}, {"degenerate", k.degenerate}};
  bool pass = true;
  if (k.degenerate) {
    ctx.out() << "degenerate sample: atom at " << k.atom.transpose() << '\n';
  } else {
    pass = std::abs(k.integral - 1.0) <= kKdeMassTolerance;
    body["integral"] = k.integral;
    body["bandwidth"] = std::vector<double>(k.bandwidth.data(), k.bandwidth.data() + k.bandwidth.size());
    ctx.out() << "kde mass " << std::setprecision(8) << k.integral << " on " << k.grid_x.size()
              << (k.dim == 2 ? "x" + std::to_string(k.grid_y.size()) : std::string()) << " grid\n";
  }
  if (f.out_dim == 1) {
    std::vector<double> values;
    values.reserve(samples.size());
    for (const auto& s : samples) values.push_back(s(0));
    const EcfCurve c = ecf(values, ctx.cfg().numbers("experiment", "u_grid", {0.5, 1.0, 2.0, 4.0, 8.0}));
    ctx.write_csv("ecf.csv", [&](std::ostream& o) { write_ecf_csv(o, c); });
    for (std::size_t i = 0; i < c.u.size(); ++i) {
      ctx.out() << "|ecf(" << c.u[i] << ")| = " << c.modulus[i] << " +- " << c.se[i] << '\n';
    }
  }
  body["pass"] = pass;
  ctx.write_json("density.json", body);
  return pass;
}

bool run_rajchman(Context& ctx) {
  const int n_max = static_cast<int>(ctx.cfg().number("experiment", "n_max", 30));
  const int k_max = static_cast<int>(ctx.cfg().number("experiment", "k_max", 8));
  const RajchmanDemo demo = rajchman_demo(n_max, k_max, ctx.nsamples(10000), ctx.seed(), ctx.jobs());
  bool pass = true;
  ctx.out() << "limit exp(-sum (1 - cos(pi/2^j))) = " << std::setprecision(8) << demo.limit << '\n';
  for (const auto& r : demo.rows) {
    pass = pass && std::abs(r.closed - demo.limit) <= kRajchmanTolerance;
    ctx.out() << "k=" << r.k << " closed " << r.closed << " mc " << r.monte_carlo << " +- " << r.se << '\n';
  }
  ctx.write_csv("rajchman.csv", [&](std::ostream& o) {
    o << "k,u,closed,monte_carlo,se\n" << std::setprecision(17);
    for (const auto& r : demo.rows) {
      o << r.k << ',' << r.u << ',' << r.closed << ',' << r.monte_carlo << ',' << r.se << '\n';
    }
  });
  ctx.write_json("rajchman.json", Json{{"limit", demo.limit}, {"tolerance", kRajchmanTolerance}, {"pass", pass}});
  return pass;
}

}  // namespace

Configuration two_atom_fixture() {
  Vector a(1), b(1);
  a << 0.5;
  b << -0.2;
  return Configuration(1.0, 1, {Atom{0.2, a}, Atom{0.6, b}}, "two_atom");
}

RunResult run_config_text(const std::string& text, const RunOptions& options, std::ostream& out,
                          std::ostream& err) {
  RunResult result;
  try {
    const RunConfig cfg = RunConfig::parse(text);
    validate_config(cfg);
    const std::uint64_t seed =
        options.seed ? *options.seed : static_cast<std::uint64_t>(cfg.number("experiment", "seed", 1.0));
    Context ctx(cfg, options, seed, hex64(fnv1a(text)), out);
    const std::string kind = cfg.word("experiment", "kind");
    bool pass = false;
    if (kind == "gamma") pass = run_gamma(ctx);
    else if (kind == "survey") pass = run_survey(ctx);
    else if (kind == "identity") pass = run_identity(ctx);
    else if (kind == "chaos") pass = run_chaos(ctx);
    else if (kind == "density") pass = run_density(ctx);
    else pass = run_rajchman(ctx);
    result.artifacts = ctx.artifacts;
    result.exit_code = pass ? kExitPass : kExitFail;
    out << (pass ? "PASS" : "FAIL") << '\n';
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    switch (e.kind()) {
      case ErrorKind::Parse: result.exit_code = kExitParse; break;
      case ErrorKind::Registry: result.exit_code = kExitRegistry; break;
      default: result.exit_code = kExitError; break;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    result.exit_code = kExitError;
  }
  return result;
}

RunResult run_config_file(const std::string& path, const RunOptions& options, std::ostream& out,
                          std::ostream& err) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    err << "error: cannot read " << path << '\n';
    return RunResult{kExitError, {}};
  }
  std::ostringstream text;
  text << in.rdbuf();
  return run_config_text(text.str(), options, out, err);
}

int list_registry(const std::string& registry, std::ostream& out, std::ostream& err) {
  try {
    for (const auto& e : registry_entries(registry)) {
      out << e.label << "  " << e.summary << '\n';
      for (const auto& p : e.params) {
        out << "    " << p.name << " = " << p.fallback << "  " << p.description << '\n';
      }
    }
    return kExitPass;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitRegistry;
  }
}

int write_fixtures(const std::string& out_dir, std::ostream& out) {
  std::filesystem::create_directories(out_dir);
  const std::string cfg_path = (std::filesystem::path(out_dir) / "two_atom.cfg").string();
  save_configuration(cfg_path, two_atom_fixture());
  const std::string run_path = (std::filesystem::path(out_dir) / "two_atom_gamma.run").string();
  std::ofstream run(run_path, std::ios::binary);
  run << "# carre du champ of (Y_1, Exp(Y)_1) on the two-atom fixture\n"
         "[model]\nfamily = power\nsymmetric = 1\n\n"
         "[functional]\nlabel = pair_doleans\nt = 1\n\n"
         "[gamma]\nspec = diag_x2\n\n"
         "[experiment]\nkind = gamma\nconfiguration = two_atom\n";
  if (!run) throw Error(ErrorKind::Io, "cannot write " + run_path);
  out << "two_atom configuration\n";
  write_configuration(out, two_atom_fixture());
  out << "wrote " << cfg_path << '\n' << "wrote " << run_path << '\n';
  return kExitPass;
}

}  // namespace lentp
