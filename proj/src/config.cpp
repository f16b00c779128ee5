#include "ealign/config.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace ealign {

namespace {

struct Field {
  const char* type;  // "number" | "integer" | "string" | "boolean" | "array"
};

const std::map<std::string, std::map<std::string, Field>>& schema() {
  static const std::map<std::string, std::map<std::string, Field>> s = {
      {"scenario",
       {{"builder", {"string"}},
        {"labels", {"integer"}},
        {"kappa", {"number"}},
        {"u0_scale", {"number"}},
        {"perturb_eps", {"number"}},
        {"amplitude", {"number"}},
        {"gamma", {"number"}},
        {"beta", {"number"}},
        {"depth", {"integer"}},
        {"bump_scale", {"number"}},
        {"p", {"number"}},
        {"delta", {"number"}},
        {"z_half_width", {"number"}},
        {"z_mass", {"number"}},
        {"radius", {"number"}},
        {"r_inner", {"number"}},
        {"r_outer", {"number"}},
        {"u0", {"string"}},
        {"rho0", {"string"}},
        {"domain", {"array"}},
        {"atoms", {"array"}},
        {"normalize_mass", {"boolean"}},
        {"allow_supercritical", {"boolean"}},
        {"smoothness_k", {"integer"}}}},
      {"kernel",
       {{"family", {"string"}},
        {"amplitude", {"number"}},
        {"s", {"number"}},
        {"scale", {"number"}},
        {"r", {"array"}},
        {"phi", {"array"}},
        {"heavy_tailed", {"boolean"}}}},
      {"integrator",
       {{"method", {"string"}},
        {"dt", {"number"}},
        {"abs_tol", {"number"}},
        {"rel_tol", {"number"}},
        {"t_max", {"number"}},
        {"tol_align", {"number"}},
        {"record_tau", {"number"}},
        {"eps_stop", {"number"}},
        {"breakdown_mode", {"boolean"}}}},
      {"analysis",
       {{"eps_z", {"number"}},
        {"degenerate_length", {"number"}},
        {"pairs", {"integer"}},
        {"rel_slack", {"number"}},
        {"eps_p_frac", {"number"}},
        {"radii_r0", {"number"}},
        {"radii_count", {"integer"}},
        {"local_dim_x", {"number"}},
        {"collapse_tol", {"number"}},
        {"atom_mass_tol_frac", {"number"}},
        {"stability_eps", {"number"}}}},
      {"output", {{"dir", {"string"}}, {"trajectory", {"boolean"}}, {"formats", {"array"}}}}};
  return s;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw EalignError("config." + path + ": " + what);
}

void check_type(const std::string& path, const Json& v, const Field& f) {
  const std::string t = f.type;
  if (t == "number" && !v.is_number()) fail(path, "expected number");
  if (t == "integer" && !v.is_number_integer()) fail(path, "expected integer");
  if (t == "string" && !v.is_string()) fail(path, "expected string");
  if (t == "boolean" && !v.is_boolean()) fail(path, "expected boolean");
  if (t == "array" && !v.is_array()) fail(path, "expected array");
}

template <class T>
T get_or(const Json& j, const char* key, T def) {
  if (!j.is_object() || !j.contains(key)) return def;
  return j.at(key).get<T>();
}

}  // namespace

Json parse_config_text(const std::string& text) {
  // JSON when the first non-space character opens an object.
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '{') return Json::parse(text);
    break;
  }
  // Dotted key = value lines; '#' starts a comment.
  Json root = Json::object();
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto notspace = [](unsigned char c) { return !std::isspace(c); };
    const auto b = std::find_if(line.begin(), line.end(), notspace);
    if (b == line.end()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw EalignError("config line " + std::to_string(lineno) + ": expected key = value");
    auto trim = [](std::string s) {
      const auto sp = [](unsigned char c) { return std::isspace(c); };
      while (!s.empty() && sp(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
      while (!s.empty() && sp(static_cast<unsigned char>(s.back()))) s.pop_back();
      return s;
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw EalignError("config line " + std::to_string(lineno) + ": empty key or value");
    Json parsed;
    try {
      parsed = Json::parse(val);
    } catch (...) {
      parsed = val;  // bare string
    }
    Json* node = &root;
    size_t start = 0;
    for (;;) {
      const size_t dot = key.find('.', start);
      const std::string part = key.substr(start, dot - start);
      if (dot == std::string::npos) {
        (*node)[part] = parsed;
        break;
      }
      node = &(*node)[part];
      start = dot + 1;
    }
  }
  return root;
}

RunConfig make_run_config(const Json& j) {
  if (!j.is_object()) throw EalignError("config: top level must be an object");
  for (const auto& [section, body] : j.items()) {
    const auto sit = schema().find(section);
    if (sit == schema().end()) fail(section, "unknown section");
    if (!body.is_object()) fail(section, "expected object");
    for (const auto& [key, value] : body.items()) {
      const auto fit = sit->second.find(key);
      if (fit == sit->second.end()) fail(section + "." + key, "unknown key");
      check_type(section + "." + key, value, fit->second);
    }
  }
  RunConfig cfg;
  cfg.resolved = j;
  const Json sc = j.value("scenario", Json::object());
  if (!sc.contains("builder")) fail("scenario.builder", "required");
  cfg.scenario_builder = sc.at("builder").get<std::string>();
  cfg.scenario = sc;

  const Json it = j.value("integrator", Json::object());
  cfg.integrator.method = get_or<std::string>(it, "method", "rk45");
  if (cfg.integrator.method != "rk4" && cfg.integrator.method != "rk45")
    fail("integrator.method", "expected \"rk4\" or \"rk45\"");
  cfg.integrator.dt = get_or(it, "dt", 0.0);
  cfg.integrator.abs_tol = get_or(it, "abs_tol", 1e-10);
  cfg.integrator.rel_tol = get_or(it, "rel_tol", 1e-8);
  cfg.integrator.t_max = get_or(it, "t_max", 200.0);
  cfg.integrator.tol_align = get_or(it, "tol_align", 1e-8);
  cfg.integrator.record_tau = get_or(it, "record_tau", 0.0);
  cfg.integrator.eps_stop = get_or(it, "eps_stop", 1e-6);
  cfg.integrator.breakdown_mode = get_or(it, "breakdown_mode", false);

  const Json an = j.value("analysis", Json::object());
  cfg.analysis.eps_z = get_or(an, "eps_z", -1.0);
  cfg.analysis.degenerate_length = get_or(an, "degenerate_length", -1.0);
  cfg.analysis.pairs = get_or<Index>(an, "pairs", 1000);
  cfg.analysis.rel_slack = get_or(an, "rel_slack", 1e-3);
  cfg.analysis.eps_p_frac = get_or(an, "eps_p_frac", 1e-3);
  cfg.analysis.radii_r0 = get_or(an, "radii_r0", 0.0);
  cfg.analysis.radii_count = get_or(an, "radii_count", 0);
  cfg.analysis.local_dim_x = get_or(an, "local_dim_x", 0.0);
  cfg.analysis.collapse_tol = get_or(an, "collapse_tol", 0.0);
  cfg.analysis.atom_mass_tol_frac = get_or(an, "atom_mass_tol_frac", 1e-8);
  cfg.analysis.stability_eps = get_or(an, "stability_eps", 1e-3);

  const Json out = j.value("output", Json::object());
  cfg.out_dir = get_or<std::string>(out, "dir", "");
  cfg.write_trajectory = get_or(out, "trajectory", true);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EalignError("cannot open config file: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return make_run_config(parse_config_text(ss.str()));
}

namespace {

Kernel kernel_from(const Json& k, int dim) {
  const std::string family = get_or<std::string>(k, "family", "powertail");
  if (family == "constant") return Kernel::constant(get_or(k, "amplitude", 1.0), dim);
  if (family == "powertail")
    return Kernel::power_tail(get_or(k, "s", 1.0), get_or(k, "scale", 1.0), dim);
  if (family == "tabulated") {
    const auto rv = k.at("r").get<std::vector<double>>();
    const auto pv = k.at("phi").get<std::vector<double>>();
    return Kernel::tabulated(
        Eigen::Map<const ArrayXd>(rv.data(), static_cast<Index>(rv.size())),
        Eigen::Map<const ArrayXd>(pv.data(), static_cast<Index>(pv.size())),
        get_or(k, "heavy_tailed", true), dim);
  }
  fail("kernel.family", "unknown family \"" + family + "\"");
}

}  // namespace

Scenario build_scenario(const RunConfig& cfg) {
  const Json& sc = cfg.scenario;
  const std::string& b = cfg.scenario_builder;
  if (b == "oracle") {
    OracleParams p;
    p.n_labels = get_or<Index>(sc, "labels", p.n_labels);
    p.kappa = get_or(sc, "kappa", p.kappa);
    p.amplitude = get_or(sc, "amplitude", p.amplitude);
    p.u0_scale = get_or(sc, "u0_scale", p.u0_scale);
    p.perturb_eps = get_or(sc, "perturb_eps", p.perturb_eps);
    return oracle_scenario(p);
  }
  if (b == "wave") {
    WaveParams p;
    p.n_labels = get_or<Index>(sc, "labels", p.n_labels);
    p.kappa = get_or(sc, "kappa", p.kappa);
    p.u0_scale = get_or(sc, "u0_scale", p.u0_scale);
    p.allow_supercritical = get_or(sc, "allow_supercritical", false);
    return wave_scenario(p);
  }
  if (b == "cantor") {
    CantorParams p;
    p.gamma = get_or(sc, "gamma", p.gamma);
    p.beta = get_or(sc, "beta", p.beta);
    p.depth = get_or(sc, "depth", p.depth);
    p.n_labels = get_or<Index>(sc, "labels", p.n_labels);
    p.kappa = get_or(sc, "kappa", p.kappa);
    p.bump_scale = get_or(sc, "bump_scale", p.bump_scale);
    return cantor_scenario(p);
  }
  if (b == "powerlaw") {
    PowerlawParams p;
    p.p = get_or(sc, "p", p.p);
    p.delta = get_or(sc, "delta", p.delta);
    p.n_labels = get_or<Index>(sc, "labels", p.n_labels);
    p.kappa = get_or(sc, "kappa", p.kappa);
    return powerlaw_scenario(p);
  }
  if (b == "plateau") {
    PlateauParams p;
    p.n_labels = get_or<Index>(sc, "labels", p.n_labels);
    p.kappa = get_or(sc, "kappa", p.kappa);
    p.z_half_width = get_or(sc, "z_half_width", p.z_half_width);
    p.z_mass = get_or(sc, "z_mass", p.z_mass);
    return plateau_scenario(p);
  }
  if (b == "disk") {
    Disk2DParams p;
    p.n_axis = get_or<Index>(sc, "labels", p.n_axis);
    p.kappa = get_or(sc, "kappa", p.kappa);
    p.radius = get_or(sc, "radius", p.radius);
    return disk_scenario(p);
  }
  if (b == "annulus") {
    Annulus2DParams p;
    p.n_axis = get_or<Index>(sc, "labels", p.n_axis);
    p.kappa = get_or(sc, "kappa", p.kappa);
    p.r_inner = get_or(sc, "r_inner", p.r_inner);
    p.r_outer = get_or(sc, "r_outer", p.r_outer);
    return annulus_scenario(p);
  }
  if (b == "custom") {
    CustomParams p;
    p.u0_expr = get_or<std::string>(sc, "u0", p.u0_expr);
    p.rho0_expr = get_or<std::string>(sc, "rho0", p.rho0_expr);
    p.n_labels = get_or<Index>(sc, "labels", p.n_labels);
    p.kappa = get_or(sc, "kappa", p.kappa);
    p.normalize_mass = get_or(sc, "normalize_mass", false);
    p.allow_supercritical = get_or(sc, "allow_supercritical", false);
    p.smoothness_k = get_or(sc, "smoothness_k", 1);
    if (sc.contains("domain")) {
      const Json& d = sc.at("domain");
      if (d.size() == 2 && d[0].is_number()) {
        p.omega = Box::interval(d[0].get<double>(), d[1].get<double>());
      } else if (d.size() == 2 && d[0].is_array()) {
        p.omega = Box::rect(d[0][0].get<double>(), d[0][1].get<double>(),
                            d[1][0].get<double>(), d[1][1].get<double>());
      } else {
        fail("scenario.domain", "expected [a, b] or [[a1, b1], [a2, b2]]");
      }
    }
    if (sc.contains("atoms")) {
      for (const Json& a : sc.at("atoms")) {
        if (a.size() == 2)
          p.atoms.push_back({a[0].get<double>(), 0.0, a[1].get<double>()});
        else if (a.size() == 3)
          p.atoms.push_back({a[0].get<double>(), a[1].get<double>(), a[2].get<double>()});
        else
          fail("scenario.atoms", "expected [x, mass] or [x, y, mass] entries");
      }
    }
    if (cfg.resolved.contains("kernel"))
      p.kernel = kernel_from(cfg.resolved.at("kernel"), p.omega.dim);
    else
      p.kernel = Kernel::power_tail(1.0, 1.0, p.omega.dim);
    return custom_scenario(p);
  }
  fail("scenario.builder", "unknown builder \"" + b + "\"");
}

}  // namespace ealign
