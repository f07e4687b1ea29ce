#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "config.hpp"
#include "levyk/decay_analysis.hpp"
#include "levyk/errors.hpp"
#include "levyk/exp_moments.hpp"
#include "levyk/format.hpp"
#include "levyk/kernels.hpp"
#include "levyk/parallel.hpp"
#include "levyk/profile_analysis.hpp"
#include "levyk/schrodinger.hpp"
#include "levyk/version.hpp"

namespace {

using namespace levyk;
using levyk::cli::Block;
using nlohmann::json;

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitUnsupported = 4;

struct Artifact {
  Artifact() = default;
  explicit Artifact(std::string t, bool p = false) : text(std::move(t)), partial(p) {}

  std::string text;
  bool partial = false;  // flagged numerical failure; written with a .partial suffix
  int exit_code = 0;
  std::vector<std::pair<std::string, std::string>> side_files;  // path, contents
};

struct Invocation {
  std::string config;
  std::string out;
  std::string method = "freq";
};

// Points along e_1 (numbers) or full vectors (arrays of length d).
std::vector<std::vector<double>> parse_vectors(const json& v, int dim, const std::string& what) {
  if (!v.is_array()) throw ConfigError(what + ": expected an array");
  std::vector<std::vector<double>> out;
  for (const json& e : v) {
    if (e.is_number()) {
      std::vector<double> p(static_cast<std::size_t>(dim), 0.0);
      p[0] = e.get<double>();
      out.push_back(p);
    } else if (e.is_array() && static_cast<int>(e.size()) == dim) {
      std::vector<double> p;
      for (const json& c : e) {
        if (!c.is_number()) throw ConfigError(what + ": vector entries must be numbers");
        p.push_back(c.get<double>());
      }
      out.push_back(p);
    } else {
      throw ConfigError(what + ": entries must be numbers or arrays of length dim");
    }
  }
  return out;
}

bool all_scalar(const json& v) {
  for (const json& e : v)
    if (!e.is_number()) return false;
  return true;
}

std::string vector_header(bool scalar, int dim) {
  if (scalar) return "xi";
  std::string h;
  for (int i = 1; i <= dim; ++i) h += (i > 1 ? ",xi_" : "xi_") + std::to_string(i);
  return h;
}

std::string vector_cells(bool scalar, const std::vector<double>& p) {
  if (scalar) return fmt17(p[0]);
  std::string s;
  for (std::size_t i = 0; i < p.size(); ++i) s += (i ? "," : "") + fmt17(p[i]);
  return s;
}

PsiMethod psi_method(const std::string& s) {
  if (s == "auto") return PsiMethod::automatic;
  if (s == "closed_form") return PsiMethod::closed_form;
  if (s == "quadrature") return PsiMethod::quadrature;
  throw ConfigError("method: expected 'auto', 'closed_form' or 'quadrature'");
}

OmegaMethod omega_method(const std::string& s) {
  if (s == "auto") return OmegaMethod::automatic;
  if (s == "closed_form") return OmegaMethod::closed_form;
  if (s == "quadrature") return OmegaMethod::quadrature;
  throw ConfigError("method: expected 'auto', 'closed_form' or 'quadrature'");
}

bool any_nonconverged(const KernelGrid& g) {
  for (unsigned f : g.flags)
    if (f & kernel_flag::nonconverged) return true;
  return false;
}

json fit_json(const DecayFit& f) {
  return {{"rate", f.rate},       {"power", f.power},
          {"x_lo", f.x_lo},       {"x_hi", f.x_hi},
          {"rms_residual", f.rms_residual}, {"n_points", f.n_points},
          {"flagged", f.flagged}};
}

Artifact cmd_psi(const LevyModel& m, Block b) {
  const json& xi = b.raw("xi");
  const PsiMethod method = psi_method(b.string("method", "auto"));
  b.finish();
  const auto pts = parse_vectors(xi, m.dim(), "psi.xi");
  const bool scalar = all_scalar(xi);
  std::ostringstream os;
  os << vector_header(scalar, m.dim()) << ",psi,error\n";
  for (const auto& p : pts) {
    const PsiEvaluation e = psi(m, p, method);
    os << vector_cells(scalar, p) << ',' << fmt17(e.value) << ',' << fmt17(e.abs_error_estimate) << '\n';
  }
  return Artifact(os.str());
}

Artifact cmd_omega(const LevyModel& m, Block b) {
  const json& xi = b.raw("xi");
  const OmegaMethod method = omega_method(b.string("method", "auto"));
  b.finish();
  const auto pts = parse_vectors(xi, m.dim(), "omega.xi");
  const bool scalar = all_scalar(xi);
  std::ostringstream os;
  os << vector_header(scalar, m.dim()) << ",omega,error,diverged\n";
  for (const auto& p : pts) {
    const OmegaEvaluation e = omega(m, p, method);
    os << vector_cells(scalar, p) << ',' << fmt17(e.value) << ',' << fmt17(e.abs_error_estimate) << ','
       << (e.diverged ? 1 : 0) << '\n';
  }
  return Artifact(os.str());
}

Artifact cmd_gamma_sweep(const LevyModel& m, Block b) {
  const std::vector<double> alphas = b.points("alphas");
  std::vector<double> theta(static_cast<std::size_t>(m.dim()), 0.0);
  theta[0] = 1.0;
  if (b.has("theta")) theta = b.numbers("theta");
  b.finish();
  const DecayRateCurve c = decay_rate_curve(m, alphas, theta);
  std::ostringstream os;
  os << "alpha,gamma,omega_star\n";
  for (std::size_t i = 0; i < c.alphas.size(); ++i)
    os << fmt17(c.alphas[i]) << ',' << fmt17(c.rates[i]) << ',' << fmt17(c.omega_star_kappa) << '\n';
  return Artifact(os.str());
}

Artifact cmd_heat(const LevyModel& m, Block b) {
  const double t = b.number("t");
  const std::vector<double> points = b.points("points");
  HeatOptions opt;
  opt.tol = b.number("tol", opt.tol);
  opt.safety = b.number("safety", opt.safety);
  opt.allow_tilt = b.boolean("allow_tilt", opt.allow_tilt);
  opt.allow_small_time = b.boolean("allow_small_time", opt.allow_small_time);
  b.finish();
  const KernelGrid g = heat_kernel(m, t, points, opt);
  std::ostringstream os;
  g.write_csv(os);
  return Artifact(os.str(), any_nonconverged(g));
}

Artifact cmd_resolvent(const LevyModel& m, Block b, const std::string& method) {
  const double alpha = b.number("alpha");
  const std::vector<double> points = b.points("points");
  b.finish();
  std::ostringstream os;
  if (method == "freq" || method == "time") {
    const KernelGrid g = method == "freq" ? resolvent_freq(m, alpha, points) : resolvent_time(m, alpha, points);
    g.write_csv(os);
    return Artifact(os.str(), any_nonconverged(g));
  }
  const KernelGrid f = resolvent_freq(m, alpha, points);
  const KernelGrid t = resolvent_time(m, alpha, points);
  os << "x,value_freq,value_time,rel_diff\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const double diff = std::abs(f.values[i] - t.values[i]) / std::abs(f.values[i]);
    os << fmt17(points[i]) << ',' << fmt17(f.values[i]) << ',' << fmt17(t.values[i]) << ',' << fmt17(diff) << '\n';
  }
  return Artifact(os.str(), any_nonconverged(f) || any_nonconverged(t));
}

Artifact cmd_kf(const LevyModel& m, Block b) {
  const bool scalar = b.has("r") && b.raw("r").is_number();
  const std::vector<double> rs = scalar ? std::vector<double>{b.number("r")} : b.points("r");
  const std::vector<double> probes = b.has("probes") ? b.points("probes") : default_kf_probes();
  b.finish();
  json reports = json::array();
  for (double r : rs) {
    const KfReport k = kf(m, r, probes);
    reports.push_back({{"r", k.r}, {"kf", k.kf}, {"argmax_probe", k.argmax_probe}, {"trend", trend_name(k.trend)},
                       {"max_at_last_probe", k.max_at_last_probe}});
  }
  return Artifact((scalar ? reports[0] : reports).dump(2) + "\n");
}

Artifact cmd_transition(const LevyModel& m, Block b) {
  const std::vector<double> alphas = b.points("alphas");
  const std::vector<double> points = b.points("points");
  std::optional<double> lo, hi;
  if (b.has("x_lo")) lo = b.number("x_lo");
  if (b.has("x_hi")) hi = b.number("x_hi");
  b.finish();
  const TransitionCurve c = transition_sweep(m, alphas, points, lo, hi);
  std::ostringstream os;
  c.write_csv(os);
  bool flagged = false;
  for (const DecayFit& f : c.fits) flagged = flagged || f.flagged;
  return Artifact(os.str(), flagged);
}

Artifact cmd_boundstate(const LevyModel& m, Block b, const std::string& out) {
  const PotentialSpec v = cli::parse_potential(b.object("potential"));
  BsGrid grid;
  grid.h = b.number("h", grid.h);
  grid.half_width = b.number("half_width", grid.half_width);
  std::string phi_path = b.string("phi_csv", out.empty() ? "" : out + ".phi.csv");
  b.finish();
  const auto r = find_bound_state(m, v, grid);
  Artifact a;
  if (!r) {
    a.text = json{{"version", kVersion}, {"bound_state", nullptr}}.dump(2) + "\n";
    return a;
  }
  json s = {{"lambda", r->lambda},
            {"lambda_error", r->lambda_error},
            {"mu_residual", r->mu_residual},
            {"predicted_rate", std::isnan(r->predicted_rate) ? json(nullptr) : json(r->predicted_rate)},
            {"tail_fit", fit_json(r->tail_fit)},
            {"converged", r->converged},
            {"grid", {{"h", r->h}, {"half_width", r->half_width}, {"nodes", r->x.size()}}}};
  if (!m.kappa()) {
    const GroundStateProfileReport p = ground_state_profile_report(*r, m);
    s["profile_ratio"] = {{"inf", p.ratio.inf_ratio}, {"sup", p.ratio.sup_ratio}, {"band", p.ratio.band},
                          {"x_lo", p.ratio.x_lo}, {"x_hi", p.ratio.x_hi}, {"window_too_small", p.window_too_small}};
  }
  a.text = json{{"version", kVersion}, {"bound_state", s}}.dump(2) + "\n";
  a.partial = !r->converged;
  if (!phi_path.empty()) {
    std::ostringstream os;
    r->write_csv(os);
    a.side_files.emplace_back(phi_path, os.str());
  }
  return a;
}

Artifact cmd_classify(const LevyModel& m, Block b) {
  const std::vector<double> probes = b.points("probes");
  std::optional<double> eps;
  if (b.has("epsilon")) eps = b.number("epsilon");
  b.finish();
  const ProfileClassification c = classify_profile(m.profile(), probes, m.dim());
  json j = {{"version", kVersion},
            {"class", profile_class_name(c.kind)},
            {"limit_estimate", std::isfinite(c.limit_estimate) ? json(c.limit_estimate) : json(nullptr)},
            {"h_tail_slope_probe", c.h_tail_slope_probe},
            {"h_eventually_increasing", c.h_eventually_increasing}};
  if (c.kind == ProfileClass::exponential) j["kappa"] = c.kappa;
  if (eps) {
    const SubexpCertificate s = subexp_bound_certificate(m.profile(), *eps, probes, m.dim());
    j["certificate"] = {{"epsilon", *eps}, {"c_tilde", s.c_tilde}, {"argmin_probe", s.argmin_probe}, {"flagged", s.flagged}};
  }
  Artifact a(j.dump(2) + "\n");
  if (c.kind == ProfileClass::super_exponential_rejected) a.exit_code = kExitUnsupported;
  return a;
}

const std::vector<std::string> kBlocks = {"psi",       "omega", "gamma_sweep", "heat",     "resolvent",
                                          "kf",        "transition", "boundstate", "classify"};

Artifact dispatch(const std::string& command, const Invocation& inv) {
  const json cfg = cli::load_config(inv.config);
  Block top(cfg, "config");
  top.integer("version");
  const LevyModel model = cli::parse_model(top.object("model"));
  for (const std::string& k : kBlocks)
    if (top.has(k) && k != command) top.raw(k);
  Block b = top.has(command) ? top.object(command) : throw ConfigError("config: missing '" + command + "' block");
  top.finish();
  if (command == "psi") return cmd_psi(model, b);
  if (command == "omega") return cmd_omega(model, b);
  if (command == "gamma_sweep") return cmd_gamma_sweep(model, b);
  if (command == "heat") return cmd_heat(model, b);
  if (command == "resolvent") return cmd_resolvent(model, b, inv.method);
  if (command == "kf") return cmd_kf(model, b);
  if (command == "transition") return cmd_transition(model, b);
  if (command == "boundstate") return cmd_boundstate(model, b, inv.out);
  return cmd_classify(model, b);
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write '" + path + "'");
  f << text;
}

int run(const std::string& command, const Invocation& inv) {
  try {
    Artifact a = dispatch(command, inv);
    if (inv.out.empty()) {
      std::cout << a.text;
    } else {
      write_file(a.partial ? inv.out + ".partial" : inv.out, a.text);
    }
    for (const auto& [path, text] : a.side_files) write_file(a.partial ? path + ".partial" : path, text);
    if (a.partial) {
      std::cerr << "levyk: " << command << ": numerical result flagged as not converged\n";
      return kExitNumeric;
    }
    return a.exit_code;
  } catch (const UnsupportedProfile& e) {
    std::cerr << "levyk: " << e.what() << '\n';
    return kExitUnsupported;
  } catch (const ConfigError& e) {
    std::cerr << "levyk: config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const DomainError& e) {
    std::cerr << "levyk: invalid parameter: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ConvergenceError& e) {
    std::cerr << "levyk: numerical failure: " << e.what() << " (best value " << fmt17(e.partial_value())
              << ", error " << fmt17(e.error_estimate()) << ")\n";
    return kExitNumeric;
  } catch (const Error& e) {
    std::cerr << "levyk: numerical failure: " << e.what() << '\n';
    return kExitNumeric;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Heat kernels, resolvents and bound states of radial Levy generators"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  int threads = 1;
  app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);

  struct Spec {
    const char* name;
    const char* block;
    const char* help;
  };
  const Spec specs[] = {
      {"psi", "psi", "Characteristic exponent at the requested points"},
      {"omega", "omega", "Exponential-moment function omega"},
      {"gamma-sweep", "gamma_sweep", "Decay rate gamma_alpha over an alpha grid"},
      {"heat", "heat", "Heat kernel p_t on a grid"},
      {"resolvent", "resolvent", "Resolvent kernel g_alpha on a grid"},
      {"kf", "kf", "Profile functional K_f(r)"},
      {"transition", "transition", "Fitted against predicted resolvent decay rates"},
      {"boundstate", "boundstate", "Ground state of -L + V"},
      {"classify", "classify", "Classify the profile tail"},
  };
  Invocation inv;
  std::string chosen;
  for (const Spec& s : specs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    sub->add_option("--config", inv.config, "JSON run configuration")->required();
    sub->add_option("--out", inv.out, "Output path (default stdout)");
    sub->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    if (std::string(s.name) == "resolvent")
      sub->add_option("--method", inv.method, "Inversion route")->check(CLI::IsMember({"freq", "time", "both"}));
    sub->callback([&chosen, &s] { chosen = s.block; });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitConfig;
  }
  set_num_threads(threads);
  return run(chosen, inv);
}
