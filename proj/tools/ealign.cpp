// ealign: simulate unidirectional Euler Alignment dynamics, extract the
// limiting flow map and measure, analyze concentration geometry, and verify
// the quantitative bounds. Exit codes: 0 all checks passed, 1 a bound check
// failed, 2 usage/config error, 3 runtime failure.
#include "ealign/acceptance.hpp"
#include "ealign/config.hpp"
#include "ealign/parallel.hpp"
#include "ealign/report.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>

namespace {

using namespace ealign;

struct CommonOpts {
  std::string config_path;
  std::string out_dir;
  int workers = 1;
  std::uint64_t seed = 12345;
};

struct LoadedRun {
  RunConfig cfg;
  Json manifest;
  std::string hash;
  std::string dir;
};

LoadedRun prepare(const CommonOpts& opts) {
  LoadedRun run;
  run.cfg = load_config(opts.config_path);
  set_worker_count(opts.workers);
  run.manifest = make_manifest(run.cfg, opts.seed);
  run.hash = manifest_hash(run.manifest);
  run.dir = !opts.out_dir.empty() ? opts.out_dir
                                  : (run.cfg.out_dir.empty() ? "." : run.cfg.out_dir);
  write_manifest(run.dir, run.manifest);
  return run;
}

int cmd_simulate(const CommonOpts& opts) {
  LoadedRun run = prepare(opts);
  const Scenario s = build_scenario(run.cfg);
  const TrajectoryRecord rec = integrate(s, run.cfg.integrator);
  if (run.cfg.write_trajectory) write_trajectory_csv(run.dir, s, rec, run.hash);
  write_diagnostics_json(run.dir, rec, run.hash);
  std::cout << "simulate: " << s.name << " stopped at t=" << rec.stop_time
            << (rec.aligned ? " (aligned)" : rec.breakdown ? " (breakdown)" : "")
            << ", frames=" << rec.frames.size() << ", rhs evals=" << rec.rhs_evals
            << "\n";
  return 0;
}

int cmd_limit(const CommonOpts& opts) {
  LoadedRun run = prepare(opts);
  const Scenario s = build_scenario(run.cfg);
  const TrajectoryRecord rec = integrate(s, run.cfg.integrator);
  if (run.cfg.write_trajectory) write_trajectory_csv(run.dir, s, rec, run.hash);
  write_diagnostics_json(run.dir, rec, run.hash);
  LimitReport lr = limit_flow_map(s, rec);
  LimitOptions lopt;
  lopt.zero_set.eps_z = run.cfg.analysis.eps_z;
  lopt.zero_set.degenerate_length = run.cfg.analysis.degenerate_length;
  lopt.atom_mass_tol_frac = run.cfg.analysis.atom_mass_tol_frac;
  lopt.collapse_tol = run.cfg.analysis.collapse_tol;
  limit_measure(lr, s, lopt);
  check_separation_bounds(lr, s, run.cfg.analysis.pairs, opts.seed,
                          run.cfg.analysis.rel_slack);
  check_density_bounds(lr, s, run.cfg.analysis.eps_p_frac, run.cfg.analysis.rel_slack);
  if (s.dim == 2) {
    aggregation_curves(lr, s);
    write_curves_csv(run.dir, lr, run.hash);
  }
  write_limit_report(run.dir, s, lr, run.hash);
  write_density_csv(run.dir, s, lr, run.hash);
  for (const BoundCheck& bc : lr.checks)
    std::cout << (bc.passed ? "PASS " : "FAIL ") << bc.name << " — " << bc.detail
              << "\n";
  std::cout << "limit: AC mass " << lr.ac_mass << ", singular mass " << lr.singular_mass
            << ", atoms " << lr.singular_atoms.size() << "\n";
  return lr.all_checks_passed() ? 0 : 1;
}

int cmd_dimension(const CommonOpts& opts) {
  LoadedRun run = prepare(opts);
  const Scenario s = build_scenario(run.cfg);
  const TrajectoryRecord rec = integrate(s, run.cfg.integrator);
  LimitReport lr = limit_flow_map(s, rec);
  LimitOptions lopt;
  lopt.zero_set.eps_z = run.cfg.analysis.eps_z;
  lopt.zero_set.degenerate_length = run.cfg.analysis.degenerate_length;
  limit_measure(lr, s, lopt);
  write_diagnostics_json(run.dir, rec, run.hash);

  if (std::isfinite(s.predicted_local_dim)) {
    const Decomp1D d = decomposition_1d(lr, s);
    RadiiSchedule sched{run.cfg.analysis.radii_r0 > 0 ? run.cfg.analysis.radii_r0 : 1e-2,
                        run.cfg.analysis.radii_count > 0 ? run.cfg.analysis.radii_count
                                                         : 7};
    DimensionEstimate de = local_dimension(d, run.cfg.analysis.local_dim_x, sched);
    de.predicted = s.predicted_local_dim;
    write_dimension_json(run.dir, de, run.hash);
    write_loglog_csv(run.dir, de, run.hash);
    std::cout << "local dimension at x=" << run.cfg.analysis.local_dim_x << ": "
              << de.estimate << " (predicted " << de.predicted << ")\n";
    return 0;
  }
  std::vector<double> pts;
  for (const ZeroSlice& sl : lr.zs.slices)
    for (const ZInterval& zi : sl.z) {
      if (zi.degenerate) continue;
      pts.push_back(xbar_at(lr, s, zi.lo, sl.slice_index));
      pts.push_back(xbar_at(lr, s, zi.hi, sl.slice_index));
    }
  if (pts.size() < 2) {
    std::cout << "dimension: no nondegenerate zero set detected; nothing to measure\n";
    return 0;
  }
  DimensionEstimate de =
      box_dimension(pts, RadiiSchedule{run.cfg.analysis.radii_r0,
                                       run.cfg.analysis.radii_count},
                    0.0, 0.0, lr.extrap_error_bound);
  if (s.cantor)
    de.predicted =
        cantor_prediction(s.cantor->gamma, s.cantor->beta, s.smoothness_k).dim;
  write_dimension_json(run.dir, de, run.hash);
  write_loglog_csv(run.dir, de, run.hash);
  std::cout << "box dimension of Xbar(Z): " << de.estimate;
  if (std::isfinite(de.predicted)) std::cout << " (predicted " << de.predicted << ")";
  std::cout << "\n";
  return 0;
}

int cmd_stability(const CommonOpts& opts) {
  LoadedRun run = prepare(opts);
  if (run.cfg.scenario_builder != "oracle")
    throw EalignError(
        "stability pairs are defined for the oracle builder (perturb_eps applies)");
  RunConfig base_cfg = run.cfg;
  base_cfg.scenario["perturb_eps"] = 0.0;
  RunConfig pert_cfg = run.cfg;
  pert_cfg.scenario["perturb_eps"] = run.cfg.analysis.stability_eps;
  const Scenario s1 = build_scenario(base_cfg);
  const Scenario s2 = build_scenario(pert_cfg);
  const StabilityReport rep = run_pair(s1, s2, run.cfg.integrator);
  write_stability_json(run.dir, rep, run.hash);
  std::string csv = "# ealign stability gaps v1 manifest=" + run.hash + "\n";
  csv += "t,gap_x,gap_v,w1\n";
  for (Index k = 0; k < rep.times.size(); ++k)
    csv += fmt_double(rep.times[k]) + ',' + fmt_double(rep.gap_x[k]) + ',' +
           fmt_double(rep.gap_v[k]) + ',' + fmt_double(rep.w1_t[k]) + '\n';
  write_text_atomic(run.dir + "/stability.csv", csv);
  for (const BoundCheck& bc : rep.checks)
    std::cout << (bc.passed ? "PASS " : "FAIL ") << bc.name << " — worst margin "
              << bc.worst << "\n";
  return rep.passed ? 0 : 1;
}

int cmd_reproduce(const std::string& name, int workers) {
  set_worker_count(workers);
  bool all_ok = true;
  for (int id : acceptance::criteria_for_case(name)) {
    const auto res = acceptance::run_criterion(id);
    std::cout << "[criterion " << res.id << "] " << (res.passed ? "PASS" : "FAIL")
              << " — " << res.name << ": " << res.detail << "\n";
    all_ok = all_ok && res.passed;
  }
  return all_ok ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ealign — unidirectional Euler Alignment simulator and analyzer"};
  app.require_subcommand(0, 1);

  CommonOpts opts;
  std::string reproduce_name;

  auto add_common = [&](CLI::App* cmd, bool needs_config = true) {
    if (needs_config)
      cmd->add_option("--config", opts.config_path, "run configuration (JSON or key=value)")
          ->required();
    cmd->add_option("--out", opts.out_dir, "output directory");
    cmd->add_option("--workers", opts.workers, "worker threads (deterministic results)");
    cmd->add_option("--seed", opts.seed, "seed for pair/perturbation sampling");
  };

  CLI::App* sim = app.add_subcommand("simulate", "integrate a scenario to alignment");
  add_common(sim);
  CLI::App* lim = app.add_subcommand("limit", "extract the limiting map and measure");
  add_common(lim);
  CLI::App* dim = app.add_subcommand("dimension", "dimension estimates of the limit");
  add_common(dim);
  CLI::App* stab = app.add_subcommand("stability", "paired perturbed run + KR bounds");
  add_common(stab);
  CLI::App* rep = app.add_subcommand("reproduce", "run a named verification case");
  rep->add_option("case", reproduce_name, "case name or 'all'")->required();
  rep->add_option("--workers", opts.workers, "worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return 2;
  }
  try {
    if (sim->parsed()) return cmd_simulate(opts);
    if (lim->parsed()) return cmd_limit(opts);
    if (dim->parsed()) return cmd_dimension(opts);
    if (stab->parsed()) return cmd_stability(opts);
    if (rep->parsed()) return cmd_reproduce(reproduce_name, opts.workers);
  } catch (const ealign::EalignError& e) {
    std::cerr << "error: " << e.what() << "\n";
    const std::string what = e.what();
    return what.rfind("config", 0) == 0 ? 2 : 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
