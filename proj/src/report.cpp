#include "ealign/report.hpp"


#include <cstdio>
#include <filesystem>
#include <fstream>

namespace ealign {

namespace fs = std::filesystem;

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.parent_path() /
                       (".tmp." + target.filename().string() + "." +
                        std::to_string(::getpid()));
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw EalignError("cannot open " + tmp.string() + " for writing");
    out << content;
    if (!out) throw EalignError("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

Json make_manifest(const RunConfig& cfg, std::uint64_t seed) {
  // Worker count deliberately stays out: artifacts must be byte-identical at
  // any worker count, and the manifest is itself an artifact.
  Json m;
  m["tool"] = "ealign";
  m["version"] = "0.1.0";
  m["config"] = cfg.resolved;
  m["seed"] = seed;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx",
                static_cast<unsigned long long>(fnv1a64(m.dump())));
  m["manifest_hash"] = buf;
  return m;
}

std::string manifest_hash(const Json& manifest) {
  return manifest.at("manifest_hash").get<std::string>();
}

void write_manifest(const std::string& dir, const Json& manifest) {
  write_text_atomic(dir + "/manifest.json", manifest.dump(2) + "\n");
}

void write_trajectory_csv(const std::string& dir, const Scenario& s,
                          const TrajectoryRecord& rec, const std::string& hash) {
  std::string out;
  out.reserve(1 << 20);
  out += "# ealign trajectory v1 manifest=" + hash + "\n";
  out += s.dim == 1 ? "t,alpha1,X,V,dX1,dV1\n" : "t,alpha1,alpha2,X,V,dX1,dV1,dX2,dV2\n";
  for (const Frame& f : rec.frames) {
    for (Index i = 0; i < s.labels(); ++i) {
      out += fmt_double(f.t);
      out += ',';
      out += fmt_double(s.a1[i]);
      if (s.dim == 2) {
        out += ',';
        out += fmt_double(s.a2[i]);
      }
      out += ',';
      out += fmt_double(f.X[i]);
      out += ',';
      out += fmt_double(f.V[i]);
      out += ',';
      out += fmt_double(f.dX1[i]);
      out += ',';
      out += fmt_double(f.dV1[i]);
      if (s.dim == 2) {
        out += ',';
        out += fmt_double(f.dX2[i]);
        out += ',';
        out += fmt_double(f.dV2[i]);
      }
      out += '\n';
    }
  }
  write_text_atomic(dir + "/trajectory.csv", out);
}

Json bound_check_json(const BoundCheck& bc) {
  Json j;
  j["name"] = bc.name;
  j["passed"] = bc.passed;
  j["worst_margin"] = bc.worst;
  j["violations"] = bc.violations;
  j["checked"] = bc.checked;
  j["detail"] = bc.detail;
  return j;
}

void write_diagnostics_json(const std::string& dir, const TrajectoryRecord& rec,
                            const std::string& hash) {
  Json j;
  j["format"] = "ealign-diagnostics-v1";
  j["manifest_hash"] = hash;
  j["method"] = rec.method;
  j["aligned"] = rec.aligned;
  j["breakdown"] = rec.breakdown;
  j["stop_time"] = rec.stop_time;
  j["rhs_evals"] = rec.rhs_evals;
  j["record_tau"] = rec.record_tau;
  j["A0"] = rec.A0;
  j["D0"] = rec.D0;
  j["M0"] = rec.M0;
  j["flocking"] = {{"diam_bound", rec.fc.diam_bound},
                   {"kernel_floor", rec.fc.kernel_floor},
                   {"a", rec.fc.a},
                   {"b", rec.fc.b}};
  Json frames = Json::array();
  for (const Frame& f : rec.frames) {
    frames.push_back({{"t", f.t},
                      {"diameter", f.diag.diameter},
                      {"amplitude", f.diag.amplitude},
                      {"min_dx1", f.diag.min_dx1},
                      {"e_residual", f.diag.e_residual},
                      {"momentum", f.diag.momentum}});
  }
  j["frames"] = frames;
  write_text_atomic(dir + "/diagnostics.json", j.dump(2) + "\n");
}

void write_limit_report(const std::string& dir, const Scenario& s, const LimitReport& lr,
                        const std::string& hash) {
  Json j;
  j["format"] = "ealign-limit-report-v1";
  j["manifest_hash"] = hash;
  j["scenario"] = s.name;
  j["extrapolation_error_bound"] = lr.extrap_error_bound;
  j["fitted_rate"] = lr.fitted_rate;
  j["tail_fit_ok"] = lr.tail_fit_ok;
  j["fallback_warning"] = lr.warning_fallback;
  j["collapse_tol"] = lr.collapse_tol;
  j["ac_mass"] = lr.ac_mass;
  j["singular_mass"] = lr.singular_mass;
  j["kappa"] = lr.kappa;
  j["M0"] = lr.M0;
  j["phi_sup"] = lr.phi_sup;
  j["phi_floor"] = lr.phi_floor;
  Json atoms = Json::array();
  for (const Atom& a : lr.singular_atoms)
    atoms.push_back({{"x1", a.x1}, {"x2", a.x2}, {"mass", a.mass}});
  j["singular_atoms"] = atoms;
  Json zs = Json::array();
  for (const ZeroSlice& sl : lr.zs.slices) {
    Json intervals = Json::array();
    for (const ZInterval& zi : sl.z)
      intervals.push_back({{"lo", zi.lo},
                           {"hi", zi.hi},
                           {"mass", zi.mass},
                           {"degenerate", zi.degenerate}});
    if (!intervals.empty())
      zs.push_back({{"a2", sl.a2_value}, {"intervals", intervals}});
  }
  j["zero_set"] = {{"eps_z", lr.zs.eps_z},
                   {"degenerate_length", lr.zs.degenerate_length},
                   {"slices", zs}};
  Json checks = Json::array();
  for (const BoundCheck& bc : lr.checks) checks.push_back(bound_check_json(bc));
  j["bound_checks"] = checks;
  write_text_atomic(dir + "/limit_report.json", j.dump(2) + "\n");
}

void write_curves_csv(const std::string& dir, const LimitReport& lr,
                      const std::string& hash) {
  std::string out = "# ealign curves v1 manifest=" + hash + "\n";
  out += "branch,alpha2,fhat,weight,lo,hi,image_diam\n";
  for (size_t b = 0; b < lr.curves.size(); ++b)
    for (const CurveSample& cs : lr.curves[b].samples)
      out += std::to_string(b) + ',' + fmt_double(cs.a2) + ',' + fmt_double(cs.fhat) +
             ',' + fmt_double(cs.weight) + ',' + fmt_double(cs.lo) + ',' +
             fmt_double(cs.hi) + ',' + fmt_double(cs.image_diam) + '\n';
  write_text_atomic(dir + "/curves.csv", out);
}

void write_density_csv(const std::string& dir, const Scenario& s, const LimitReport& lr,
                       const std::string& hash) {
  std::string out = "# ealign density v1 manifest=" + hash + "\n";
  out += "alpha1,xbar,dx1bar,rho_bar,on_z\n";
  for (Index i = 0; i < s.n_ac; ++i) {
    out += fmt_double(s.a1[i]) + ',' + fmt_double(lr.xbar[i]) + ',' +
           fmt_double(lr.dx1bar[i]) + ',' + fmt_double(lr.rho_bar[i]) + ',' +
           (lr.on_z[static_cast<size_t>(i)] ? '1' : '0');
    out += '\n';
  }
  write_text_atomic(dir + "/density.csv", out);
}

void write_dimension_json(const std::string& dir, const DimensionEstimate& de,
                          const std::string& hash, const std::string& stem) {
  Json j;
  j["format"] = "ealign-dimension-v1";
  j["manifest_hash"] = hash;
  j["tag"] = de.source_tag;
  j["estimate"] = de.estimate;
  j["predicted"] = de.predicted;
  j["slope"] = de.fit.slope;
  j["intercept"] = de.fit.intercept;
  j["residual"] = de.fit.residual;
  Json table = Json::array();
  for (Index k = 0; k < de.radii.size(); ++k)
    table.push_back({{"r", de.radii[k]},
                     {"value", de.values[k]},
                     {"used", static_cast<bool>(de.used[static_cast<size_t>(k)])}});
  j["table"] = table;
  write_text_atomic(dir + "/" + stem + ".json", j.dump(2) + "\n");
}

void write_loglog_csv(const std::string& dir, const DimensionEstimate& de,
                      const std::string& hash, const std::string& stem) {
  std::string out = "# ealign loglog v1 manifest=" + hash + "\n";
  out += "r,value,used\n";
  for (Index k = 0; k < de.radii.size(); ++k)
    out += fmt_double(de.radii[k]) + ',' + fmt_double(de.values[k]) + ',' +
           (de.used[static_cast<size_t>(k)] ? '1' : '0') + '\n';
  write_text_atomic(dir + "/" + stem + ".csv", out);
}

void write_stability_json(const std::string& dir, const StabilityReport& rep,
                          const std::string& hash) {
  Json j;
  j["format"] = "ealign-stability-v1";
  j["manifest_hash"] = hash;
  j["passed"] = rep.passed;
  j["w1_m0"] = rep.w1_m0;
  j["du0_inf"] = rep.du0_inf;
  j["w1_limit"] = rep.w1_limit;
  j["constants"] = {{"a", rep.k.a},
                    {"b", rep.k.b},
                    {"c", rep.k.c},
                    {"C", rep.k.C},
                    {"C_X", rep.k.C_X},
                    {"C_V", rep.k.C_V},
                    {"C_W", rep.k.C_W},
                    {"amplification", rep.k.amplification},
                    {"grad_x_envelope", rep.k.envelope_grad_x}};
  Json series = Json::array();
  for (Index k = 0; k < rep.times.size(); ++k)
    series.push_back({{"t", rep.times[k]},
                      {"gap_x", rep.gap_x[k]},
                      {"gap_v", rep.gap_v[k]},
                      {"w1", rep.w1_t[k]}});
  j["series"] = series;
  Json checks = Json::array();
  for (const BoundCheck& bc : rep.checks) checks.push_back(bound_check_json(bc));
  j["checks"] = checks;
  write_text_atomic(dir + "/stability.json", j.dump(2) + "\n");
}

}  // namespace ealign
