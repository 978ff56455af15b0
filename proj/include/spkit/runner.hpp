#pragma once

// Scenario runner shared by the command-line tool and the integration tests:
// loads a scenario configuration, runs the enabled checks and/or the
// simulation, and writes CSV trajectories, a verification report (text and
// key:value form) and a run manifest.
//
// Exit codes: 0 all enabled checks passed, 1 check failure, 2 configuration
// error (thrown as ConfigError, mapped by the caller), 3 the run diverged or
// missed its convergence target when convergence was expected.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "spkit/catalog.hpp"
#include "spkit/certificates.hpp"
#include "spkit/config.hpp"
#include "spkit/csv.hpp"
#include "spkit/scenarios.hpp"
#include "spkit/source_seeking.hpp"
#include "spkit/version.hpp"

namespace spkit {

struct RunnerOptions {
  std::string out_dir;  // empty: write nothing to disk
  std::optional<std::uint64_t> seed_override;
  std::optional<double> t_final_override;
  bool quiet = false;
  bool simulate_enabled = true;  // `check` runs verification only
};

class RunReport {
 public:
  void add(const std::string& key, const std::string& value) {
    kv_.emplace_back(key, value);
  }
  void add(const std::string& key, double value) {
    add(key, detail::num_str(value));
  }
  void add(const std::string& key, bool value) {
    add(key, value ? std::string("true") : std::string("false"));
  }
  void add(const std::string& key, std::size_t value) {
    add(key, std::to_string(value));
  }

  void add_condition(const std::string& prefix, const ConditionCheck& c) {
    add(prefix + "." + c.name + ".pass", c.pass);
    if (c.worst > -std::numeric_limits<double>::infinity())
      add(prefix + "." + c.name + ".worst_violation", c.worst);
    if (c.worst_margin < std::numeric_limits<double>::infinity())
      add(prefix + "." + c.name + ".worst_margin", c.worst_margin);
    if (c.witness && !c.pass) {
      std::ostringstream w;
      w << "x=[" << c.witness->x.transpose() << "] z=["
        << c.witness->z.transpose() << "]";
      add(prefix + "." + c.name + ".witness", w.str());
    }
    if (c.witness_r) add(prefix + "." + c.name + ".witness_r", *c.witness_r);
    if (!c.pass) fail();
  }

  void add_report(const std::string& prefix, const VerificationReport& rep) {
    for (const auto& c : rep.checks) add_condition(prefix, c);
    add(prefix + ".pass", rep.pass());
  }

  void fail() { all_pass_ = false; }
  bool all_pass() const { return all_pass_; }

  std::string kv_text() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) os << k << ": " << v << "\n";
    return os.str();
  }

  std::string human_text() const {
    std::ostringstream os;
    os << "spkit verification/run report\n";
    os << "-----------------------------\n";
    std::size_t width = 0;
    for (const auto& [k, v] : kv_) width = std::max(width, k.size());
    for (const auto& [k, v] : kv_)
      os << k << std::string(width - k.size() + 2, ' ') << v << "\n";
    os << "-----------------------------\n";
    os << "overall: " << (all_pass_ ? "PASS" : "FAIL") << "\n";
    return os.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> kv_;
  bool all_pass_ = true;
};

namespace detail {

inline ScenarioBundle make_bundle(const ScenarioConfig& cfg) {
  const auto& t = cfg.table;
  ScenarioBundle b;
  if (cfg.scenario == "example1_saturated") {
    b = saturated_dynamics_scenario(t.get_double("scenario.c0", 0.4),
                                    t.get_double("scenario.varrho", 0.9));
  } else if (cfg.scenario == "example2_feedback_opt") {
    const std::string gain = t.get_string("scenario.gain", "nonlinear");
    if (gain == "nonlinear")
      b = feedback_optimization_scenario();
    else if (gain == "constant")
      b = feedback_optimization_constant_gain(
          t.get_double("scenario.coeff", 0.004));
    else
      throw ConfigError("scenario.gain", "expected nonlinear or constant");
  } else if (cfg.scenario == "integral_control") {
    const std::string gain = t.get_string("scenario.gain", "nonlinear");
    if (gain != "nonlinear" && gain != "constant")
      throw ConfigError("scenario.gain", "expected nonlinear or constant");
    b = integral_control_scenario(gain == "nonlinear",
                                  t.get_double("scenario.coeff", 0.004));
  } else {
    throw ConfigError("scenario", "no bundle for '" + cfg.scenario + "'");
  }
  const double scale = t.get_double("scenario.alpha_s_scale", 1.0);
  if (scale != 1.0 && b.certificate) {
    const auto base = b.certificate->alpha_s;
    b.certificate->alpha_s =
        ComparisonCurve([base, scale](double r) { return scale * base(r); },
                        CurveClass::PD, {}, "alpha_s_scaled");
  }
  return b;
}

inline std::pair<VecX, VecX> default_initial_state(const std::string& scenario,
                                                   const ScenarioBundle& b,
                                                   const ConfigTable& t) {
  VecX x0(1), z0(1);
  if (scenario == "example1_saturated") {
    x0 << 1.0;
    z0 << 1.0;
  } else if (scenario == "example2_feedback_opt") {
    if (t.get_string("scenario.gain", "nonlinear") == "constant") {
      x0 << 0.5;
      z0 << 1.5;
    } else {
      x0 << 2.0;
      z0 << -1.0;
    }
  } else {
    x0 << 1.0;
    z0 << -1.0;
  }
  (void)b;
  return {x0, z0};
}

inline void write_file(const std::string& dir, const std::string& name,
                       const std::string& content) {
  std::ofstream out(std::filesystem::path(dir) / name, std::ios::binary);
  out << content;
}

inline std::vector<VecX> linspace_grid(double lo, double hi, int count) {
  std::vector<VecX> grid;
  for (int i = 0; i < count; ++i) {
    VecX v(1);
    v << lo + (hi - lo) * static_cast<double>(i) /
                  static_cast<double>(count - 1);
    grid.push_back(v);
  }
  return grid;
}

// Decrease cross-validation over seeded initial conditions in the box.
inline void run_decrease_checks(const ScenarioBundle& b,
                                const ScenarioConfig& cfg, RunReport& rep) {
  const auto lyap = make_composite_lyapunov(*b.certificate,
                                            *b.conditions->sigma);
  const CounterRng rng = CounterRng{cfg.seed}.substream(2);
  SimConfig sim;
  sim.t_final = 200.0;
  sim.dt = 1e-3;
  sim.record_every = 1;
  std::uint64_t counter = 0;
  std::size_t total_violations = 0;
  for (int k = 0; k < cfg.checks.decrease_runs; ++k) {
    VecX x0(b.system.n), z0(b.system.m);
    for (Eigen::Index i = 0; i < b.system.n; ++i)
      x0[i] = rng.uniform(counter++, b.box.x_lo[i], b.box.x_hi[i]);
    for (Eigen::Index i = 0; i < b.system.m; ++i)
      z0[i] = rng.uniform(counter++, b.box.z_lo[i], b.box.z_hi[i]);
    const auto traj = simulate(b.system, x0, z0, sim);
    const auto dec = check_lyapunov_decrease(traj, lyap, 0.0);
    total_violations += dec.violations;
  }
  rep.add("check.decrease.runs",
          static_cast<std::size_t>(cfg.checks.decrease_runs));
  rep.add("check.decrease.violations", total_violations);
  rep.add("check.decrease.pass", total_violations == 0);
  if (total_violations != 0) rep.fail();
}

inline int finish_run_status(const ScenarioConfig& cfg, bool converged,
                             bool diverged, RunReport& rep) {
  rep.add("run.converged", converged);
  rep.add("run.diverged", diverged);
  const bool expect_diverge =
      cfg.table.get_bool("run.expect_diverge", false);
  if (diverged && !expect_diverge) return 3;
  if (cfg.run.expect_converge && !converged) return 3;
  return 0;
}

inline int execute_bundle_scenario(const ScenarioConfig& cfg,
                                   const RunnerOptions& opt, RunReport& rep) {
  const ScenarioBundle b = make_bundle(cfg);
  const auto samples = make_sample_set(
      b.box, cfg.checks.sample_count, CounterRng{cfg.seed}.substream(1),
      &b.system);

  if (cfg.checks.steady_state) {
    const auto grid = linspace_grid(b.box.x_lo[0], b.box.x_hi[0], 201);
    const auto ss = check_steady_state_map(b.system, grid);
    rep.add("check.steady_state.max_fast_residual", ss.max_fast_residual);
    rep.add("check.steady_state.slow_residual", ss.slow_residual_origin);
    rep.add("check.steady_state.pass", ss.pass);
    if (!ss.pass) rep.fail();
  }
  if (cfg.checks.certificate && b.certificate) {
    rep.add_report("check.certificate",
                   verify_certificate(b.system, *b.certificate, samples));
    rep.add_condition("check.certificate",
                      check_certificate_gradients(
                          *b.certificate,
                          std::vector<StateSample>(
                              samples.begin(),
                              samples.begin() +
                                  std::min<std::size_t>(samples.size(), 1000))));
    if (b.drive_envelope)
      rep.add_condition("check.certificate",
                        validate_drive_envelope(b.system, *b.drive_envelope,
                                                samples));
  }
  bool conditions_pass = false;
  if (cfg.checks.conditions && b.certificate && b.conditions) {
    const auto vr = verify_perturbation_conditions(b.system, *b.certificate,
                                                   *b.conditions, samples);
    rep.add_report("check.conditions", vr);
    conditions_pass = vr.pass();
  }
  if (cfg.checks.ratio_sweep && cfg.scenario == "example1_saturated") {
    const auto sweep = saturated_c0_sweep(default_varrho_grid());
    rep.add("check.c0_max.value", sweep.c0_max);
    rep.add("check.c0_max.varrho", sweep.best_varrho);
    const double c0 = cfg.table.get_double("scenario.c0", 0.4);
    rep.add("check.c0_max.scenario_c0_admissible", c0 < sweep.c0_max);
  }
  if (cfg.checks.derived_gain && b.certificate && b.conditions &&
      b.drive_envelope) {
    const auto gtilde = drive_bound_from_gamma_f(
        *b.certificate, b.conditions->gamma_f, *b.drive_envelope);
    const auto derived =
        derive_slow_gain(b.conditions->rho_s_upper, gtilde);
    rep.add("check.derived_gain.coefficient", derived(1.0));
    const double coeff = cfg.table.get_double("scenario.coeff", 0.004);
    // Shipped quadratic gain coeff*r^2: admissible iff
    // coeff * g^3 <= rho_s_upper(s) with g = gtilde(s), checked forward.
    bool admissible = true;
    for (double s : default_grid()) {
      const double g = gtilde(s);
      if (g <= 0.0) continue;
      if (coeff * g * g * g > b.conditions->rho_s_upper(s) * (1.0 + 1e-9)) {
        admissible = false;
        break;
      }
    }
    rep.add("check.derived_gain.shipped_coefficient", coeff);
    rep.add("check.derived_gain.shipped_admissible", admissible);
    if (!admissible) rep.fail();
  }
  if (cfg.checks.decrease && b.certificate && b.conditions) {
    if (conditions_pass || !cfg.checks.conditions)
      run_decrease_checks(b, cfg, rep);
    else
      rep.add("check.decrease.skipped",
              std::string("conditions failed; decrease not certified"));
  }

  if (!cfg.run.enabled || !opt.simulate_enabled) return 0;

  auto [x0, z0] = default_initial_state(cfg.scenario, b, cfg.table);
  if (cfg.x0) x0 = *cfg.x0;
  if (cfg.z0) z0 = *cfg.z0;
  if (x0.size() != b.system.n)
    throw ConfigError("initial.x", "expected dimension " +
                                       std::to_string(b.system.n));
  if (z0.size() != b.system.m)
    throw ConfigError("initial.z", "expected dimension " +
                                       std::to_string(b.system.m));
  auto traj = simulate(b.system, x0, z0, cfg.sim);
  if (b.certificate && b.conditions && b.conditions->sigma)
    attach_lyapunov(traj, *b.certificate,
                    make_composite_lyapunov(*b.certificate,
                                            *b.conditions->sigma));
  if (!opt.out_dir.empty()) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, b.system.n, b.system.m);
    write_file(opt.out_dir, "trajectory.csv", csv.str());
  }
  const VecX tx = cfg.run.target_x ? *cfg.run.target_x : b.x_eq;
  const VecX tz = cfg.run.target_z ? *cfg.run.target_z : b.z_eq;
  const double dist = std::hypot((traj.final_x() - tx).norm(),
                                 (traj.final_z() - tz).norm());
  rep.add("run.t_final", traj.times.back());
  rep.add("run.final_distance", dist);
  rep.add("run.steps_accepted", traj.steps.accepted);
  const bool converged = !traj.diverged && dist <= cfg.run.target_tol;
  return finish_run_status(cfg, converged, traj.diverged, rep);
}

inline SourceSeekingScenario make_seeking_scenario(const ScenarioConfig& cfg) {
  const auto& t = cfg.table;
  SourceSeekingScenario scn = make_square_formation_scenario();
  scn.mu = t.get_double("scenario.mu", 2.0);
  scn.c0 = t.get_double("scenario.c0", 0.05);
  scn.p_epsilon = t.get_double("scenario.p_epsilon", 0.2);
  VecX p_star(2);
  p_star << 3.0, -2.0;
  p_star = t.get_vector("scenario.p_star", p_star);
  if (p_star.size() != 2)
    throw ConfigError("scenario.p_star", "expected 2 components");
  scn.p_star = p_star;
  const VecX target = p_star;
  scn.objective.value = [target](const VecX& p) {
    return (p - target).squaredNorm();
  };
  scn.objective.grad = [target](const VecX& p) {
    return VecX(2.0 * (p - target));
  };
  if (!(scn.mu > 0.0)) throw ConfigError("scenario.mu", "must be positive");
  if (!(scn.c0 > 0.0)) throw ConfigError("scenario.c0", "must be positive");
  if (!(scn.p_epsilon > 0.0))
    throw ConfigError("scenario.p_epsilon", "must be positive");
  return scn;
}

inline void write_agent_csv(std::ostream& os,
                            const SourceSeekingScenario& scn,
                            const Trajectory& traj) {
  const int N = scn.agent_count, n = scn.dim;
  os << "t";
  for (int i = 1; i <= N; ++i)
    for (int k = 1; k <= n; ++k) os << ",p_" << i << "_" << k;
  for (int i = 1; i <= N; ++i)
    for (int k = 1; k <= n; ++k) os << ",delta_" << i << "_" << k;
  for (int i = 1; i <= N; ++i)
    for (int k = 1; k <= n; ++k) os << ",q_" << i << "_" << k;
  os << "\n";
  const Eigen::Index nd = static_cast<Eigen::Index>(n) * N;
  for (std::size_t s = 0; s < traj.size(); ++s) {
    detail::put_g17(os, traj.times[s]);
    for (Eigen::Index i = 0; i < nd; ++i) {
      os << ',';
      detail::put_g17(os, traj.x[s][i]);
    }
    for (Eigen::Index i = 0; i < 2 * nd; ++i) {
      os << ',';
      detail::put_g17(os, traj.z[s][i]);
    }
    os << "\n";
  }
}

inline int execute_seeking_scenario(const ScenarioConfig& cfg,
                                    const RunnerOptions& opt, RunReport& rep) {
  const SourceSeekingScenario scn = make_seeking_scenario(cfg);
  const auto mats = build_reduced_network(scn);
  const int N = scn.agent_count, n = scn.dim;
  const Eigen::Index nd = static_cast<Eigen::Index>(n) * N;

  if (cfg.checks.network) {
    validate_scenario(scn, CounterRng{cfg.seed}.substream(3));
    rep.add("check.network.lyapunov_residual", mats.lyapunov_residual);
    rep.add("check.network.pass", mats.lyapunov_residual <= 1e-8);
    if (mats.lyapunov_residual > 1e-8) rep.fail();
    const auto sys = reduced_seeking_system(scn, mats);
    double worst = 0.0;
    const CounterRng rng = CounterRng{cfg.seed}.substream(4);
    for (std::uint64_t k = 0; k < 5; ++k) {
      VecX p0(n);
      for (int i = 0; i < n; ++i)
        p0[i] = rng.uniform(k * static_cast<std::uint64_t>(n) + i, -4.0, 4.0);
      worst = std::max(worst,
                       sys.g_f(equilibrium_map(scn, mats, p0), p0, VecX(0))
                           .norm());
    }
    rep.add("check.network.equilibrium_residual", worst);
    rep.add("check.network.equilibrium_pass", worst <= 1e-10);
    if (worst > 1e-10) rep.fail();
  }

  if (cfg.checks.estimator) {
    std::vector<VecX> frozen(N, VecX(n));
    for (int i = 0; i < N; ++i) frozen[i] = scn.p_star + 2.0 * scn.d0[i];
    const auto full = frozen_estimator_full(scn, frozen);
    SimConfig sim;
    sim.t_final = 100.0;
    sim.dt = 1e-3;
    sim.record_every = 1000;
    const auto traj = simulate(full, VecX(0), VecX::Zero(full.m), sim);
    VecX target = VecX::Zero(n);
    for (int i = 0; i < N; ++i)
      target += scn.d0[i] * scn.objective.value(frozen[i]);
    double worst = 0.0;
    for (int j = 0; j < N; ++j)
      worst = std::max(worst, (traj.final_z().segment(
                                   static_cast<Eigen::Index>(j) * n, n) -
                               target)
                                  .norm());
    rep.add("check.estimator.frozen_error", worst);
    rep.add("check.estimator.frozen_pass", worst <= 1e-6);
    if (worst > 1e-6) rep.fail();

    const auto reduced = frozen_estimator_reduced(scn, mats, frozen);
    VecX z0_full(2 * nd);
    for (Eigen::Index i = 0; i < 2 * nd; ++i)
      z0_full[i] = std::sin(0.7 * static_cast<double>(i + 1));
    const Eigen::MatrixXd U1k = Eigen::kroneckerProduct(
        mats.U1, Eigen::MatrixXd::Identity(n, n));
    VecX z0_red(nd + U1k.cols());
    z0_red.head(nd) = z0_full.head(nd);
    z0_red.tail(U1k.cols()) = U1k.transpose() * z0_full.tail(nd);
    SimConfig sim2;
    sim2.t_final = 20.0;
    sim2.dt = 1e-3;
    sim2.record_every = 100;
    const auto tf = simulate(full, VecX(0), z0_full, sim2);
    const auto tr = simulate(reduced, VecX(0), z0_red, sim2);
    double gap = 0.0;
    for (std::size_t k = 0; k < std::min(tf.size(), tr.size()); ++k)
      gap = std::max(gap, (tf.z[k].head(nd) - tr.z[k].head(nd)).norm());
    rep.add("check.estimator.reduction_gap", gap);
    rep.add("check.estimator.reduction_pass", gap <= 1e-8);
    if (gap > 1e-8) rep.fail();
  }

  if (!cfg.run.enabled || !opt.simulate_enabled) return 0;

  const auto sys = full_closed_loop_system(scn);
  VecX x0 = VecX::Zero(sys.n);
  VecX z0 = VecX::Zero(sys.m);
  if (cfg.x0) x0 = *cfg.x0;
  if (cfg.z0) z0 = *cfg.z0;
  if (x0.size() != sys.n)
    throw ConfigError("initial.x",
                      "expected dimension " + std::to_string(sys.n));
  if (z0.size() != sys.m)
    throw ConfigError("initial.z",
                      "expected dimension " + std::to_string(sys.m));
  const auto traj = simulate(sys, x0, z0, cfg.sim);

  double entry_time = -1.0;
  double max_dist_last_quarter = 0.0;
  double max_formation = 0.0;
  double worst_vf_sum = 0.0;
  bool stayed = true;
  for (std::size_t k = 0; k < traj.size(); ++k) {
    VecX mean = VecX::Zero(n);
    for (int i = 0; i < N; ++i)
      mean += traj.x[k].segment(static_cast<Eigen::Index>(i) * n, n);
    mean /= static_cast<double>(N);
    const double dist = (mean - scn.p_star).norm();
    if (entry_time < 0.0 && dist <= scn.p_epsilon) entry_time = traj.times[k];
    if (traj.times[k] >= 0.75 * cfg.sim.t_final) {
      max_dist_last_quarter = std::max(max_dist_last_quarter, dist);
      if (dist > scn.p_epsilon) stayed = false;
    }
    for (int i = 0; i < N; ++i)
      max_formation = std::max(
          max_formation,
          (traj.x[k].segment(static_cast<Eigen::Index>(i) * n, n) - mean -
           scn.d0[i])
              .norm());
    const auto vel = agent_velocities(scn, traj.x[k], traj.z[k].head(nd));
    VecX vf_sum = VecX::Zero(n);
    for (const auto& v : vel.formation) vf_sum += v;
    worst_vf_sum = std::max(worst_vf_sum, vf_sum.norm());
  }
  VecX final_mean = VecX::Zero(n);
  for (int i = 0; i < N; ++i)
    final_mean += traj.final_x().segment(static_cast<Eigen::Index>(i) * n, n);
  final_mean /= static_cast<double>(N);

  rep.add("run.final_p0_distance", (final_mean - scn.p_star).norm());
  rep.add("run.ball_entry_time", entry_time);
  rep.add("run.stayed_in_ball_last_quarter", entry_time >= 0.0 && stayed);
  rep.add("run.max_formation_error", max_formation);
  rep.add("run.max_formation_velocity_sum", worst_vf_sum);
  rep.add("run.steps_accepted", traj.steps.accepted);

  if (!opt.out_dir.empty()) {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj, sys.n, sys.m);
    write_file(opt.out_dir, "trajectory.csv", csv.str());
    std::ostringstream agents;
    write_agent_csv(agents, scn, traj);
    write_file(opt.out_dir, "agents.csv", agents.str());
  }
  const bool converged = !traj.diverged && entry_time >= 0.0 && stayed;
  return finish_run_status(cfg, converged, traj.diverged, rep);
}

inline ComparisonCurve require_curve(const ConfigTable& t,
                                     const std::string& key) {
  if (!t.has(key)) throw ConfigError(key, "missing curve specification");
  try {
    return parse_curve(t.get_string(key));
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

inline int execute_custom_scenario(const ScenarioConfig& cfg,
                                   const RunnerOptions& opt, RunReport& rep) {
  (void)opt;
  const auto& t = cfg.table;
  if (cfg.checks.small_gain || cfg.checks.sigma) {
    const auto gamma_s = require_curve(t, "curves.gamma_s");
    const auto gamma_f = require_curve(t, "curves.gamma_f");
    const auto sg = check_small_gain(gamma_f, gamma_s, default_grid());
    rep.add("check.small_gain.pass", sg.pass);
    rep.add("check.small_gain.worst_margin", sg.worst_margin);
    rep.add("check.small_gain.worst_r", sg.worst_r);
    if (!sg.pass) rep.fail();
    if (cfg.checks.sigma && sg.pass) {
      const auto sigma = construct_sigma(gamma_s, gamma_f, default_grid());
      rep.add("check.sigma.pass", true);
      rep.add("check.sigma.value_at_1", sigma(1.0));
    }
  }
  if (cfg.checks.ratio) {
    ISSCertificate cert;
    cert.alpha_s_lower = require_curve(t, "curves.alpha_s_lower");
    cert.alpha_f_lower = require_curve(t, "curves.alpha_f_lower");
    cert.gamma_s = require_curve(t, "curves.gamma_s");
    if (t.has("curves.chi_s")) cert.chi_s = require_curve(t, "curves.chi_s");
    cert.alpha_f = require_curve(t, "curves.alpha_f");
    cert.lambda_f1 = require_curve(t, "curves.lambda_f1");
    cert.lambda_f2 = t.has("curves.lambda_f2")
                         ? require_curve(t, "curves.lambda_f2")
                         : ComparisonCurve([](double) { return 0.0; },
                                           CurveClass::Unspecified, {}, "zero");
    const auto env = require_curve(t, "curves.g_envelope");
    const auto res = find_max_timescale_ratio(cert, env);
    rep.add("check.c0_max.value", res.c0);
    rep.add("check.c0_max.unsatisfiable", res.unsatisfiable);
    if (res.unsatisfiable) rep.fail();
  }
  rep.add("run.skipped", std::string("custom scenario has no dynamics"));
  return 0;
}

}  // namespace detail

// Runs one configured scenario. Returns the process exit status; writes
// artifacts into opt.out_dir when it is nonempty.
inline int run_scenario(ScenarioConfig cfg, const RunnerOptions& opt,
                        std::ostream& console) {
  if (opt.seed_override) {
    cfg.seed = *opt.seed_override;
    cfg.table.set("seed", std::to_string(cfg.seed));
  }
  if (opt.t_final_override) {
    cfg.sim.t_final = *opt.t_final_override;
    cfg.table.set("sim.t_final", detail::num_str(cfg.sim.t_final));
    if (!(cfg.sim.t_final > 0.0))
      throw ConfigError("sim.t_final", "must be positive");
  }

  if (!opt.out_dir.empty())
    std::filesystem::create_directories(opt.out_dir);

  RunReport rep;
  rep.add("scenario", cfg.scenario);
  rep.add("seed", static_cast<std::size_t>(cfg.seed));
  rep.add("toolkit.version", std::string(kVersion));

  int run_status = 0;
  if (cfg.scenario == "source_seeking")
    run_status = detail::execute_seeking_scenario(cfg, opt, rep);
  else if (cfg.scenario == "custom")
    run_status = detail::execute_custom_scenario(cfg, opt, rep);
  else
    run_status = detail::execute_bundle_scenario(cfg, opt, rep);

  const int status = run_status != 0 ? run_status : (rep.all_pass() ? 0 : 1);
  rep.add("exit_status", static_cast<std::size_t>(status));

  if (!opt.out_dir.empty()) {
    detail::write_file(opt.out_dir, "report.kv", rep.kv_text());
    detail::write_file(opt.out_dir, "report.txt", rep.human_text());
    detail::write_file(opt.out_dir, "manifest.cfg",
                       cfg.table.serialize() + "toolkit.version = " +
                           std::string(kVersion) + "\n");
  }
  if (!opt.quiet) console << rep.human_text();
  return status;
}

inline int run_scenario_path(const std::string& config_path,
                             const RunnerOptions& opt, std::ostream& console) {
  return run_scenario(load_scenario_config(config_path), opt, console);
}

}  // namespace spkit
