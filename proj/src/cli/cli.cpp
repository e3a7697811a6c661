#include "gdl/cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <memory>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "gdl/density/density.hpp"
#include "gdl/errors.hpp"
#include "gdl/fock/fock_probe.hpp"
#include "gdl/products/canonical_products.hpp"
#include "gdl/radial/radial_construction.hpp"
#include "gdl/rotating/rotating_growth.hpp"

namespace gdl::cli {
namespace {

using nlohmann::json;
constexpr double kPi = std::numbers::pi;

// Thrown for bad parameter values found after parsing.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Every option is bound to a variable; values missing on the command line
// are taken from the --config file, and the final values form the resolved
// config embedded in reports.
class Bindings {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& var, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + name, var, help);
    if constexpr (!std::is_same_v<T, std::string> && !std::is_same_v<T, std::vector<double>> &&
                  !std::is_same_v<T, std::vector<long long>>) {
      opt->capture_default_str();
    }
    entries_.push_back({app, name, opt, [&var](const json& j) { var = j.get<T>(); }, [&var] { return json(var); }});
    return opt;
  }

  CLI::Option* add(CLI::App* app, const std::string& name, std::optional<double>& var, const std::string& help) {
    CLI::Option* opt = app->add_option("--" + name, var, help);
    entries_.push_back({app, name, opt,
                        [&var](const json& j) {
                          if (j.is_null()) {
                            var.reset();
                          } else {
                            var = j.get<double>();
                          }
                        },
                        [&var] { return var ? json(*var) : json(nullptr); }});
    return opt;
  }

  CLI::Option* flag(CLI::App* app, const std::string& name, bool& var, const std::string& help) {
    CLI::Option* opt = app->add_flag("--" + name, var, help);
    entries_.push_back({app, name, opt, [&var](const json& j) { var = j.get<bool>(); }, [&var] { return json(var); }});
    return opt;
  }

  // Applies config values for options of `apps` not given on the command line.
  void apply(const json& cfg, const std::vector<const CLI::App*>& apps) {
    for (auto& e : entries_) {
      if (!owned_by(e, apps) || e.opt->count() > 0 || !cfg.contains(e.name)) continue;
      try {
        e.from_json(cfg.at(e.name));
      } catch (const json::exception& ex) {
        throw UsageError("config key '" + e.name + "': " + ex.what());
      }
    }
  }

  json resolved(const std::vector<const CLI::App*>& apps) const {
    json j = json::object();
    for (const auto& e : entries_) {
      if (owned_by(e, apps)) j[e.name] = e.to_json();
    }
    return j;
  }

 private:
  struct Entry {
    const CLI::App* app;
    std::string name;
    CLI::Option* opt;
    std::function<void(const json&)> from_json;
    std::function<json()> to_json;
  };

  static bool owned_by(const Entry& e, const std::vector<const CLI::App*>& apps) {
    return std::find(apps.begin(), apps.end(), e.app) != apps.end();
  }

  std::vector<Entry> entries_;
};

// Replaces non-finite numbers by null so no inf/nan reaches a report.
json sanitize(json j) {
  if (j.is_number_float() && !std::isfinite(j.get<double>())) return nullptr;
  if (j.is_structured()) {
    for (auto& v : j) v = sanitize(v);
  }
  return j;
}

struct Globals {
  std::string config;
  std::string out = "-";
  std::string report;
  std::uint64_t seed = 1;
  int digits = 60;
  std::optional<double> tol;
  int threads = 1;
};

class Output {
 public:
  Output(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
    if (!path.empty() && path != "-") {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) throw UsageError("cannot open output file " + path);
      stream_ = file_.get();
    }
  }
  std::ostream& operator*() { return *stream_; }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* stream_;
};

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw UsageError(std::string(what) + ": expected 'a,b'");
  try {
    std::size_t used = 0;
    const std::string a = text.substr(0, comma);
    const std::string b = text.substr(comma + 1);
    const double x = std::stod(a, &used);
    if (used != a.size()) throw std::invalid_argument(a);
    const double y = std::stod(b, &used);
    if (used != b.size()) throw std::invalid_argument(b);
    return {x, y};
  } catch (const std::logic_error&) {
    throw UsageError(std::string(what) + ": cannot parse '" + text + "'");
  }
}

// Radius window "r_lo,r_hi" to log radii; r_lo = 0 means from the origin.
std::pair<double, double> log_window(const std::string& text) {
  const auto [lo, hi] = parse_pair(text, "--window");
  if (!(lo >= 0.0 && lo < hi)) throw UsageError("--window: need 0 <= r_lo < r_hi");
  return {lo == 0.0 ? -std::numeric_limits<double>::infinity() : std::log(lo), std::log(hi)};
}

PointSet read_points(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") return read_point_set_csv(in, "stdin");
  std::ifstream file(path);
  if (!file) throw UsageError("cannot open input file " + path);
  return read_point_set_csv(file, path);
}

void require(bool ok, const std::string& message) {
  if (!ok) throw UsageError(message);
}

json density_json(const DensityReport& r) {
  return {{"upper", r.upper},
          {"lower", r.lower},
          {"window_log_r", {r.window_log_r.first, r.window_log_r.second}},
          {"eval_radii_count", r.eval_radii_count},
          {"convergence_spread", r.convergence_spread}};
}

// Per-command state; the parsed values live here while the handlers run.
struct Params {
  // construct / verify radial
  double beta = 0.5;
  std::vector<double> R;
  std::vector<double> log_radii;
  std::vector<long long> counts;
  double spacing = 1.0;
  double radius = 20.0;
  std::string window = "0,1200";
  // density
  std::string in = "-";
  std::string density_window = "50,1100";
  int rpd = 1000;
  // verify rotating
  int K = 1;
  int samples = 10000;
  int radii = 20;
  int probes = 100;
  // verify tau-bound
  double upper = 0.0;
  double lower = 0.0;
  // jensen
  double r = 5.7;
  int random = 0;
  double disk = 5.0;
  // growth
  double C = 0.3;
  std::vector<double> growth_R{10, 15, 20, 25, 30};
  double terms_factor = 256.0;
  int angles = 256;
  // gram
  std::string nodes;
  std::string lattice = "1,4";
  int degree = 20;
  bool minimality = false;
  // bargmann
  std::string signal = "gaussian";
  double t0 = 0.0;
  double w0 = 0.0;
  double zmax = 2.0;
  int grid = 21;
  int samples_n = 4096;
  double t_min = -6.0;
  double t_max = 6.0;
  bool isometry = false;
  double fock_radius = 3.5;
  // plot-annulus
  int annulus = -1;
  std::string plot_grid = "512x512";
};

struct Context {
  Globals g;
  Params p;
  std::istream& in;
  std::ostream& out;
  std::ostream& err;
  json config;

  json report(const std::string& command, json result) const {
    return sanitize(json{{"schema", kSchema}, {"command", command}, {"config", config}, {"result", std::move(result)}});
  }

  void emit_json(const json& j) {
    Output o(g.out, out);
    *o << j.dump(2) << '\n';
  }

  // Bulk commands: data to --out, the report to --report when given.
  void emit_side_report(const json& j) {
    if (g.report.empty()) return;
    Output o(g.report, err);
    *o << j.dump(2) << '\n';
  }
};

int cmd_theorem4a(Context& c) {
  const auto params = radial::Theorem4aParams::make(c.p.beta, c.p.R);
  json result{{"a_squared", params.a_squared},
              {"delta", params.delta ? json(*params.delta) : json(nullptr)},
              {"R", params.R},
              {"measure", radial::measure_to_json(radial::build_measure(params))}};
  c.emit_json(c.report("construct theorem4a", result));
  return kExitOk;
}

int cmd_circlepack(Context& c) {
  const PointSet set = circle_pack_set(c.p.log_radii, c.p.counts);
  Output o(c.g.out, c.out);
  write_point_set_csv(*o, set);
  c.emit_side_report(c.report("construct circlepack", {{"points", set.size()}}));
  return kExitOk;
}

int cmd_lattice(Context& c) {
  require(c.p.spacing > 0.0 && c.p.radius > 0.0, "--spacing and --radius must be positive");
  const PointSet set = lattice_section(c.p.spacing, c.p.radius);
  Output o(c.g.out, c.out);
  write_point_set_csv(*o, set);
  c.emit_side_report(c.report("construct lattice", {{"points", set.size()}}));
  return kExitOk;
}

int cmd_atomize(Context& c) {
  const auto params = radial::Theorem4aParams::make(c.p.beta, c.p.R);
  const PointSet set = radial::atomize(radial::build_measure(params), log_window(c.p.window), c.g.seed, c.g.threads);
  Output o(c.g.out, c.out);
  write_point_set_csv(*o, set);
  c.emit_side_report(c.report("construct atomize", {{"points", set.size()}, {"a_squared", params.a_squared}}));
  return kExitOk;
}

int cmd_density(Context& c) {
  const PointSet set = read_points(c.p.in, c.in);
  const auto window = log_window(c.p.density_window);
  require(std::isfinite(window.first), "density: --window must start at a positive radius");
  const DensityReport r = density_report(set, window, c.p.rpd);
  json result = density_json(r);
  result["points"] = set.size();
  result["sharp_upper_bound_ok"] = sharp_upper_bound_check(r, c.g.tol.value_or(0.02));
  c.emit_json(c.report("density", result));
  return kExitOk;
}

int cmd_verify_rotating(Context& c) {
  const rotating::RotatingParams params{c.p.K, c.g.digits};
  params.validate();
  require(c.p.samples > 0 && c.p.radii > 0 && c.p.probes > 0, "--samples, --radii and --probes must be positive");
  const double tol = c.g.tol.value_or(1e-14);
  std::mt19937_64 rng(c.g.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double base = kPi * params.K;

  double identity3 = 0.0;
  double identity12 = 0.0;
  bool g_dominates = true;
  for (int i = 0; i < c.p.samples; ++i) {
    const double th = base + kPi * (0.001 + 0.998 * unit(rng));
    const LogPolarPoint p = LogPolarPoint::make(std::exp(th), kTwoPi * unit(rng));
    const auto gc = rotating::g_components(p, params.digits);
    const double t = rotating::theta(p.log_r);
    identity3 = std::max(identity3, std::abs(gc.g3 - (gc.g1 + gc.g2) / 2.0));
    identity12 = std::max(identity12, std::abs(gc.g1 - gc.g2 - 2.0 * std::sin(t) * std::sin(t - 2.0 * p.phi)));
    if (rotating::classify(p, params).kind != rotating::RegionKind::OnS) {
      g_dominates = g_dominates && rotating::g(p, params) >= gc.g3 - 1e-15;
    }
  }

  double mean_err = 0.0;
  for (int i = 0; i < c.p.radii; ++i) {
    const double th = base + kPi * (i + 0.5) / c.p.radii;
    const double lr = std::exp(th);
    mean_err = std::max(mean_err, std::abs(rotating::angular_mean_g(lr, params) - 2.0 * std::abs(std::sin(th))));
  }

  double sup_density = 0.0;
  constexpr int kDensityGrid = 20000;
  for (int i = 0; i <= kDensityGrid; ++i) {
    const double th = base + kPi * i / kDensityGrid;
    sup_density = std::max(sup_density, rotating::predicted_density(std::exp(th), params));
  }

  double min_deficit = std::numeric_limits<double>::infinity();
  bool probes_ok = true;
  for (int i = 0; i < c.p.probes; ++i) {
    const double th = base + kPi * (0.02 + 0.96 * unit(rng));
    const LogPolarPoint p = LogPolarPoint::make(std::exp(th), kTwoPi * unit(rng));
    for (int j = 1; j <= 3; ++j) {
      try {
        const double d = rotating::subharmonicity_probe(j, p, params);
        min_deficit = std::min(min_deficit, d);
        probes_ok = probes_ok && d >= 0.0;
      } catch (const PrecisionInsufficient&) {
        probes_ok = false;
      }
    }
  }

  const bool ok_identities = identity3 <= tol && identity12 <= tol;
  const bool ok_mean = mean_err <= 1e-10;
  const bool ok_density = sup_density >= 1.0 / kPi - 1e-6 && sup_density <= 1.0 / kPi + 1e-15;
  json result{{"identity_g3_max_err", identity3},   {"identity_g1_minus_g2_max_err", identity12},
              {"identities_pass", ok_identities},  {"g_ge_g3", g_dominates},
              {"angular_mean_max_err", mean_err},  {"angular_mean_pass", ok_mean},
              {"sup_predicted_density", sup_density}, {"sup_density_pass", ok_density},
              {"min_probe_deficit", min_deficit},  {"subharmonicity_pass", probes_ok}};
  const bool all = ok_identities && g_dominates && ok_mean && ok_density && probes_ok;
  result["pass"] = all;
  c.emit_json(c.report("verify rotating", result));
  return all ? kExitOk : kExitVerificationFailed;
}

int cmd_verify_radial(Context& c) {
  const auto params = radial::Theorem4aParams::make(c.p.beta, c.p.R);
  const auto props = radial::verify_properties(params);
  const auto hcheck = radial::check_H_nonnegative(params);
  const auto convex = radial::check_deficiency_convex(params);
  json result{{"a_squared", params.a_squared},
              {"H_nonnegative", {{"min", hcheck.min_value}, {"pass", hcheck.pass}}},
              {"deficiency_convex", {{"min_normalized_second_difference", convex.min_normalized}, {"pass", convex.pass}}},
              {"property_i",
               {{"k", props.k_values},
                {"remainder_over_log_R", props.remainder_over_log},
                {"stability_ratio", props.stability_ratio},
                {"pass", props.i_pass},
                {"structural_pass", props.i_structural_pass}}},
              {"property_ii", {{"constant", props.fitted_constant}, {"max_excess", props.ii_max_excess}, {"pass", props.ii_pass}}},
              {"property_iii", {{"liminf", props.liminf_estimate}, {"pass", props.iii_pass}}},
              {"property_iv", {{"limsup", props.limsup_estimate}, {"pass", props.iv_pass}}}};
  const bool all = hcheck.pass && convex.pass && props.i_pass && props.i_structural_pass && props.ii_pass &&
                   props.iii_pass && props.iv_pass;
  result["pass"] = all;
  c.emit_json(c.report("verify radial", result));
  return all ? kExitOk : kExitVerificationFailed;
}

int cmd_verify_tau(Context& c) {
  require(c.p.upper >= 0.0 && c.p.lower >= 0.0, "--upper and --lower must be nonnegative");
  DensityReport r;
  r.upper = c.p.upper;
  r.lower = c.p.lower;
  const double tol = c.g.tol.value_or(0.0);
  const bool holds = sharp_upper_bound_check(r, tol);
  json result{{"upper", c.p.upper},
              {"lower", c.p.lower},
              {"tau_upper", c.p.upper > 0.0 ? json(tau(c.p.upper)) : json(nullptr)},
              {"holds", holds}};
  c.emit_json(c.report("verify tau-bound", result));
  return holds ? kExitOk : kExitVerificationFailed;
}

int cmd_jensen(Context& c) {
  require(c.p.r > 0.0, "--r must be positive");
  PointSet zeros;
  if (c.p.random > 0) {
    require(c.p.disk > 0.0, "--disk must be positive");
    std::mt19937_64 rng(c.g.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<LogPolarPoint> pts;
    for (int i = 0; i < c.p.random; ++i) {
      const double rad = c.p.disk * std::sqrt(unit(rng));
      pts.push_back(LogPolarPoint::make(std::log(rad), kTwoPi * unit(rng)));
    }
    zeros = PointSet(std::move(pts), "random");
  } else {
    zeros = read_points(c.p.in, c.in);
  }
  const auto rep = products::jensen_verify(zeros, std::log(c.p.r));
  json result = products::to_json(rep);
  result["zeros"] = zeros.size();
  const bool ok = std::abs(rep.gap) <= c.g.tol.value_or(1e-6);
  result["pass"] = ok;
  c.emit_json(c.report("jensen", result));
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_integral(Context& c) {
  const double value = products::growth_constant();
  const double alternate = products::growth_constant_alternate();
  const double target = 1.5 * kPi;
  const double tol = c.g.tol.value_or(1e-8);
  json result{{"value", value},
              {"target", "3*pi/2"},
              {"abs_err", std::abs(value - target)},
              {"alternate_form", alternate},
              {"forms_abs_diff", std::abs(value - alternate)}};
  const bool ok = std::abs(value - target) <= tol && std::abs(value - alternate) <= tol;
  result["pass"] = ok;
  c.emit_json(c.report("integral", result));
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_growth(Context& c) {
  require(c.p.C > 0.0, "--C must be positive");
  require(!c.p.growth_R.empty(), "--R needs at least one radius");
  double r_max = 0.0;
  for (double R : c.p.growth_R) r_max = std::max(r_max, R);
  const auto count = static_cast<std::size_t>(std::ceil(c.p.terms_factor * c.p.C * r_max * r_max)) + 1;
  const auto spec = products::ProductSpec::extremal(c.p.C, count);
  products::CertificateOptions opt;
  opt.terms_factor = c.p.terms_factor;
  opt.coarse_angles = c.p.angles;
  opt.threads = c.g.threads;
  const auto rep = products::fock_membership_certificate(spec, c.p.growth_R, opt);
  Output o(c.g.out, c.out);
  products::write_growth_csv(*o, rep);
  c.emit_side_report(c.report("growth", {{"asymptote", rep.asymptote},
                                         {"margin", rep.margin},
                                         {"in_fock_certified", rep.in_fock_certified},
                                         {"bound_3pi2_C", 1.5 * kPi * c.p.C}}));
  return kExitOk;
}

int cmd_gram(Context& c) {
  std::vector<fock::Complex> nodes;
  if (!c.p.nodes.empty()) {
    nodes = fock::nodes_from(read_points(c.p.nodes, c.in));
  } else {
    const auto [s, hw] = parse_pair(c.p.lattice, "--lattice");
    require(s > 0.0 && hw >= 0.0, "--lattice: need spacing > 0 and half width >= 0");
    nodes = fock::nodes_from(lattice_section(s, hw));
  }
  require(!nodes.empty(), "gram: no nodes");
  require(c.p.degree >= 0, "--degree must be nonnegative");
  const auto g = fock::build_gram(nodes, c.g.threads);
  Output o(c.g.out, c.out);
  fock::write_gram_csv(*o, g);

  const double trace = g.entries.trace().real();
  const double min_ev = fock::min_eigenvalue(g);
  const bool psd = min_ev >= -1e-10 * trace;
  json completeness = json::object();
  const auto res = fock::completeness_residual(nodes, c.p.degree);
  for (std::size_t n = 0; n < res.size(); ++n) completeness[std::to_string(n)] = res[n];
  json result{{"nodes", nodes.size()}, {"min_eigenvalue", min_ev}, {"psd", psd}, {"completeness", completeness}};
  if (c.p.minimality && nodes.size() >= 2) {
    json minimality = json::object();
    for (std::size_t i = 0; i < nodes.size(); ++i) minimality[std::to_string(i)] = fock::minimality_residual(nodes, i);
    result["minimality"] = minimality;
  }
  c.emit_side_report(c.report("gram", result));
  return psd ? kExitOk : kExitVerificationFailed;
}

int cmd_bargmann(Context& c) {
  require(c.p.samples_n >= 16 && c.p.t_min < c.p.t_max, "bargmann: need --n >= 16 and --t-min < --t-max");
  require(c.p.grid >= 2 && c.p.zmax > 0.0, "bargmann: need --grid >= 2 and --zmax > 0");
  const auto window = [](double t) { return fock::Complex(fock::gaussian_window(t), 0.0); };
  const auto n = static_cast<std::size_t>(c.p.samples_n);
  fock::SampledSignal f;
  std::function<fock::Complex(fock::Complex)> exact;
  if (c.p.signal == "gaussian") {
    f = fock::sample(window, c.p.t_min, c.p.t_max, n);
    exact = [](fock::Complex) { return fock::Complex(1.0, 0.0); };
  } else if (c.p.signal == "shifted") {
    f = fock::tf_shift(window, c.p.t0, c.p.w0, c.p.t_min, c.p.t_max, n);
    const fock::Complex lambda(c.p.t0, c.p.w0);
    exact = [lambda](fock::Complex z) { return fock::shifted_window_transform(lambda, z); };
  } else if (c.p.signal == "tphi") {
    // 2 sqrt(pi) t phi(t) has unit norm and transform sqrt(pi) z.
    f = fock::sample([&](double t) { return 2.0 * std::sqrt(kPi) * t * window(t); }, c.p.t_min, c.p.t_max, n);
    exact = [](fock::Complex z) { return std::sqrt(kPi) * z; };
  } else {
    throw UsageError("--signal must be gaussian, shifted or tphi");
  }
  if (f.clipped()) c.err << "warning: signal is not negligible at the grid ends\n";

  double max_dev = 0.0;
  for (int i = 0; i < c.p.grid; ++i) {
    for (int k = 0; k < c.p.grid; ++k) {
      const fock::Complex z(-c.p.zmax + 2.0 * c.p.zmax * i / (c.p.grid - 1),
                            -c.p.zmax + 2.0 * c.p.zmax * k / (c.p.grid - 1));
      if (std::abs(z) > c.p.zmax) continue;
      max_dev = std::max(max_dev, std::abs(fock::bargmann(f, z) - exact(z)));
    }
  }
  const double tol = c.g.tol.value_or(1e-6);
  const double norm = fock::l2_norm(f);
  json result{{"signal", c.p.signal}, {"l2_norm", norm}, {"max_abs_dev", max_dev}};
  bool ok = max_dev <= tol;
  if (c.p.isometry) {
    products::FockGridOptions grid;
    grid.cell_width = 0.02;
    grid.n_angles = 1536;
    const auto log_abs = [&](fock::Complex z) { return std::log(std::abs(fock::bargmann(f, z))); };
    // Off-centre signals need a finer grid near the truncation radius.
    double fock_norm = 0.0;
    for (int refinements = 0;; ++refinements) {
      try {
        fock_norm = std::sqrt(products::fock_norm_estimate(log_abs, c.p.fock_radius, grid).to_double());
        break;
      } catch (const ResolutionTooCoarse&) {
        if (refinements == 3) throw;
        grid.cell_width /= 2;
        grid.n_angles *= 2;
      }
    }
    result["fock_norm"] = fock_norm;
    result["fock_cell_width"] = grid.cell_width;
    result["fock_angles"] = grid.n_angles;
    result["isometry_abs_err"] = std::abs(fock_norm - norm);
    ok = ok && std::abs(fock_norm - norm) <= 1e-4;
  }
  result["pass"] = ok;
  c.emit_json(c.report("bargmann", result));
  return ok ? kExitOk : kExitVerificationFailed;
}

int cmd_plot_annulus(Context& c) {
  const rotating::RotatingParams params{c.p.K, c.g.digits};
  params.validate();
  const auto x = c.p.plot_grid.find('x');
  require(x != std::string::npos, "--grid must look like 512x512");
  int n_theta = 0;
  int n_phi = 0;
  try {
    n_theta = std::stoi(c.p.plot_grid.substr(0, x));
    n_phi = std::stoi(c.p.plot_grid.substr(x + 1));
  } catch (const std::logic_error&) {
    throw UsageError("--grid must look like 512x512");
  }
  const int annulus = c.p.annulus < 0 ? c.p.K : c.p.annulus;
  const auto rows = rotating::sample_annulus(params, annulus, n_theta, n_phi);
  Output o(c.g.out, c.out);
  rotating::write_annulus_csv(*o, rows);
  c.emit_side_report(c.report("plot-annulus", {{"rows", rows.size()}}));
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Density laboratory for Gaussian Gabor systems", "gdl"};
  app.require_subcommand(1);
  app.fallthrough();
  Context c{{}, {}, in, out, err, json::object()};
  Globals& g = c.g;
  Params& p = c.p;
  Bindings b;

  app.add_option("--config", g.config, "JSON file with option values; flags override it");
  app.add_option("--out", g.out, "output path ('-' for stdout)");
  app.add_option("--report", g.report, "JSON report path for commands that emit CSV data");
  b.add(&app, "seed", g.seed, "random seed");
  b.add(&app, "digits", g.digits, "significant digits for high-precision probes");
  b.add(&app, "tol", g.tol, "tolerance override for the command's check");
  b.add(&app, "threads", g.threads, "worker threads");

  auto* construct = app.add_subcommand("construct", "build a point set or measure");
  construct->require_subcommand(1);
  auto* c_t4a = construct->add_subcommand("theorem4a", "radial measure with liminf beta and limsup a^2");
  b.add(c_t4a, "beta", p.beta, "lower density target in [0, 1)");
  b.add(c_t4a, "R", p.R, "radius schedule (default 10 * 100^(k-1), k = 1..8)")->delimiter(',');
  auto* c_cp = construct->add_subcommand("circlepack", "equally spaced points on circles");
  b.add(c_cp, "log-radii", p.log_radii, "log radii of the circles")->delimiter(',')->required();
  b.add(c_cp, "counts", p.counts, "points per circle")->delimiter(',')->required();
  auto* c_lat = construct->add_subcommand("lattice", "square section of a square lattice");
  b.add(c_lat, "spacing", p.spacing, "lattice spacing");
  b.add(c_lat, "radius", p.radius, "half width of the section");
  auto* c_at = construct->add_subcommand("atomize", "unit-mass atomization of the radial measure");
  b.add(c_at, "beta", p.beta, "lower density target in [0, 1)");
  b.add(c_at, "R", p.R, "radius schedule")->delimiter(',');
  b.add(c_at, "window", p.window, "radius window r_lo,r_hi (r_lo = 0: from the origin)");

  auto* density = app.add_subcommand("density", "windowed upper/lower density of a point set");
  b.add(density, "in", p.in, "point set CSV ('-' for stdin)");
  b.add(density, "window", p.density_window, "radius window r_lo,r_hi");
  b.add(density, "rpd", p.rpd, "evaluation radii per decade");

  auto* verify = app.add_subcommand("verify", "property checks");
  verify->require_subcommand(1);
  auto* v_rot = verify->add_subcommand("rotating", "identities of the rotating-growth potential");
  b.add(v_rot, "K", p.K, "base annulus index");
  b.add(v_rot, "samples", p.samples, "random points for the pointwise identities");
  b.add(v_rot, "radii", p.radii, "radii for the angular-mean identity");
  b.add(v_rot, "probes", p.probes, "points for the subharmonicity probe");
  auto* v_rad = verify->add_subcommand("radial", "properties of the radial construction");
  b.add(v_rad, "beta", p.beta, "lower density target in [0, 1)");
  b.add(v_rad, "R", p.R, "radius schedule")->delimiter(',');
  auto* v_tau = verify->add_subcommand("tau-bound", "check D- <= tau(D+) and D+ <= e");
  b.add(v_tau, "upper", p.upper, "upper density")->required();
  b.add(v_tau, "lower", p.lower, "lower density")->required();

  auto* jensen = app.add_subcommand("jensen", "both sides of Jensen's formula");
  b.add(jensen, "in", p.in, "zeros as point set CSV ('-' for stdin)");
  b.add(jensen, "r", p.r, "probe radius");
  b.add(jensen, "random", p.random, "use this many seeded uniform zeros instead of --in");
  b.add(jensen, "disk", p.disk, "radius of the disk for --random");

  auto* integral = app.add_subcommand("integral", "the 3 pi / 2 growth constant");

  auto* growth = app.add_subcommand("growth", "growth slopes of the extremal genus-2 product");
  b.add(growth, "C", p.C, "density parameter, a_n = sqrt(n / C)");
  b.add(growth, "R", p.growth_R, "radii")->delimiter(',');
  b.add(growth, "terms-factor", p.terms_factor, "partial product length / (C R^2)");
  b.add(growth, "angles", p.angles, "coarse angular scan size");

  auto* gram = app.add_subcommand("gram", "normalized kernel Gram matrix and residuals");
  b.add(gram, "nodes", p.nodes, "node set CSV (overrides --lattice)");
  b.add(gram, "lattice", p.lattice, "square lattice section spacing,half_width");
  b.add(gram, "degree", p.degree, "largest monomial degree for completeness residuals");
  b.flag(gram, "minimality", p.minimality, "also compute every minimality residual");

  auto* bargmann = app.add_subcommand("bargmann", "Bargmann transform checks");
  b.add(bargmann, "signal", p.signal, "gaussian | shifted | tphi");
  b.add(bargmann, "t0", p.t0, "time shift (shifted)");
  b.add(bargmann, "w0", p.w0, "frequency shift (shifted)");
  b.add(bargmann, "zmax", p.zmax, "check the transform on |z| <= zmax");
  b.add(bargmann, "grid", p.grid, "points per axis of the check grid");
  b.add(bargmann, "n", p.samples_n, "signal samples");
  b.add(bargmann, "t-min", p.t_min, "signal grid start");
  b.add(bargmann, "t-max", p.t_max, "signal grid end");
  b.flag(bargmann, "isometry", p.isometry, "also compare the Fock norm with the L2 norm");
  b.add(bargmann, "fock-radius", p.fock_radius, "truncation radius of the Fock norm");

  auto* plot = app.add_subcommand("plot-annulus", "region map of one annulus as CSV");
  b.add(plot, "K", p.K, "base annulus index");
  b.add(plot, "annulus", p.annulus, "annulus index n >= K (default K)");
  b.add(plot, "grid", p.plot_grid, "n_theta x n_phi, e.g. 512x512");

  for (CLI::App* sub : {construct, verify, c_t4a, c_cp, c_lat, c_at, density, v_rot, v_rad, v_tau, jensen, integral,
                        growth, gram, bargmann, plot}) {
    sub->fallthrough();
  }

  std::vector<const char*> argv{"gdl"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  // The selected chain, e.g. {app, verify, radial}.
  std::vector<const CLI::App*> chain{&app};
  std::string command;
  for (const CLI::App* cur = &app; !cur->get_subcommands().empty();) {
    cur = cur->get_subcommands().front();
    chain.push_back(cur);
    command += (command.empty() ? "" : " ") + cur->get_name();
  }

  try {
    if (!g.config.empty()) {
      std::ifstream file(g.config);
      if (!file) throw UsageError("cannot open config file " + g.config);
      json cfg;
      try {
        file >> cfg;
      } catch (const json::exception& e) {
        throw UsageError(std::string("config is not valid JSON: ") + e.what());
      }
      if (!cfg.is_object()) throw UsageError("config must be a JSON object");
      b.apply(cfg, chain);
    }
    if (g.threads < 1) throw UsageError("--threads must be >= 1");
    if (p.R.empty()) p.R = radial::default_schedule();
    c.config = b.resolved(chain);
    // Results do not depend on the thread count, so it stays out of reports.
    c.config.erase("threads");

    static const std::map<std::string, int (*)(Context&)> handlers{
        {"construct theorem4a", cmd_theorem4a}, {"construct circlepack", cmd_circlepack},
        {"construct lattice", cmd_lattice},     {"construct atomize", cmd_atomize},
        {"density", cmd_density},               {"verify rotating", cmd_verify_rotating},
        {"verify radial", cmd_verify_radial},   {"verify tau-bound", cmd_verify_tau},
        {"jensen", cmd_jensen},                 {"integral", cmd_integral},
        {"growth", cmd_growth},                 {"gram", cmd_gram},
        {"bargmann", cmd_bargmann},             {"plot-annulus", cmd_plot_annulus}};
    const auto it = handlers.find(command);
    if (it == handlers.end()) throw UsageError("incomplete command: " + command);
    return it->second(c);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const InvalidParams& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const LengthMismatch& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "failed: " << e.what() << '\n';
    return kExitVerificationFailed;
  }
}

}  // namespace gdl::cli
