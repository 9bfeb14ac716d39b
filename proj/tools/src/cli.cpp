// Copyright 2026 The uatraj Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "uatraj_cli/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "uatraj/uatraj.hpp"

namespace uatraj::cli {
namespace {

namespace fs = std::filesystem;

constexpr double kGradientTolerance = 1e-4;

struct Options {
  std::string scenario;
  std::string out = ".";
  std::string config;
  std::string trajectory;
  std::string variants;
  std::string grad_mode;
  std::optional<std::uint64_t> seed;
  int scenarios = 20;
  int rollouts = 20;
  int parallel = 1;
  bool corrupt_gradient = false;
};

// Thrown for failures that map onto a specific exit code.
struct Exit {
  int code;
  std::string message;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

RunSettings load_settings(const Options& o) {
  RunSettings s = o.config.empty() ? RunSettings{} : load_run_settings(o.config);
  if (o.grad_mode == "fd") {
    s.optimizer.gradient_mode = GradientMode::kFiniteDifference;
  } else if (o.grad_mode == "analytic") {
    s.optimizer.gradient_mode = GradientMode::kAnalytic;
  }
  s.noise.apply(s.sampling.noise);
  if (s.noise.o_star) s.sampling.fixed_o_star = s.noise.o_star;
  return s;
}

Scenario load_scenario_for(const Options& o, const RunSettings& s) {
  if (o.scenario.empty()) throw Exit{kConfigError, "--scenario is required"};
  Scenario sc = load_scenario(o.scenario);
  s.noise.apply(sc.noise);
  try {
    sc.noise.validate();
  } catch (const Error& e) {
    throw Error(ErrorCode::kConfig, std::string("noise: ") + e.what());
  }
  if (o.seed) sc.seed = *o.seed;
  return sc;
}

// The trajectory given with --trajectory, else the interpolation baseline.
Trajectory initial_trajectory(const Options& o, const Scenario& sc) {
  if (o.trajectory.empty()) return make_baseline(sc);
  Trajectory t = load_trajectory(o.trajectory);
  if (t.waypoints.front().vector() != sc.start.vector() ||
      t.waypoints.back().vector() != sc.goal.vector()) {
    throw Error(ErrorCode::kConfig,
                o.trajectory + ": endpoints differ from the scenario");
  }
  return t;
}

std::string resolved_config(const RunSettings& s, const Scenario* sc,
                            const std::string& extra = "") {
  std::string out = "{\"settings\":" + run_settings_to_json(s);
  if (sc) out += ",\"scenario\":" + scenario_to_json(*sc);
  out += extra;
  return out + "}";
}

void write_out(const Options& o, const std::string& name,
               const std::string& contents) {
  std::error_code ec;
  fs::create_directories(o.out, ec);
  if (ec) {
    throw Error(ErrorCode::kConfig,
                "cannot create '" + o.out + "': " + ec.message());
  }
  write_file((fs::path(o.out) / name).string(), contents);
}

int cmd_optimize(const Options& o, std::ostream& out, std::ostream& err) {
  const RunSettings s = load_settings(o);
  const Scenario sc = load_scenario_for(o, s);
  const Trajectory initial = initial_trajectory(o, sc);
  const Metadata meta{"optimize", sc.seed, resolved_config(s, &sc)};

  PlanningProblem problem = sc.problem(s.mask, s.optimizer.pose_loss);
  problem.noise = worst_case_scale(sc.noise, s.worst_case_factor);

  OptimizeResult res;
  BeliefTrace before, after;
  try {
    res = optimize(initial, problem, s.optimizer);
    before = propagate(initial, sc.cameras, sc.noise, AblationMask::full(),
                       sc.prior, sc.propagation);
    after = propagate(res.trajectory, sc.cameras, sc.noise,
                      AblationMask::full(), sc.prior, sc.propagation);
  } catch (const Error& e) {
    throw Exit{kOptimizationFailure,
               std::string("optimization failed: ") + e.what()};
  }

  write_out(o, "trajectory.json",
            trajectory_to_json(res.trajectory, sc.cameras, meta));
  write_out(o, "history.csv", history_to_csv(res.history, meta));
  write_out(o, "trace_before.json", belief_trace_to_json(before, meta));
  write_out(o, "trace_after.json", belief_trace_to_json(after, meta));
  write_out(o, "plot_data.csv",
            trace_plot_csv(res.trajectory, sc.cameras, after, meta));

  const Belief& b0 = before.final_belief();
  const Belief& b1 = after.final_belief();
  out << "iterations " << res.history.size() - 1 << " ("
      << to_string(res.status) << ")\n"
      << "loss " << num(res.initial_loss().total) << " -> "
      << num(res.final_loss().total) << "\n"
      << "trace " << num(b0.covariance.trace()) << " -> "
      << num(b1.covariance.trace()) << "\n"
      << "entropy " << num(entropy(b0)) << " -> " << num(entropy(b1)) << "\n";
  if (res.line_search_failure) {
    err << "warning: line search failed; returning the best iterate\n";
  }
  return kOk;
}

int cmd_propagate(const Options& o, std::ostream& out, std::ostream&) {
  const RunSettings s = load_settings(o);
  const Scenario sc = load_scenario_for(o, s);
  const Trajectory traj = initial_trajectory(o, sc);
  const Metadata meta{"propagate", sc.seed, resolved_config(s, &sc)};
  BeliefTrace trace;
  try {
    trace = propagate(traj, sc.cameras, sc.noise, s.mask, sc.prior,
                      sc.propagation);
  } catch (const Error& e) {
    throw Exit{kOptimizationFailure,
               std::string("propagation failed: ") + e.what()};
  }
  write_out(o, "trace.json", belief_trace_to_json(trace, meta));
  write_out(o, "plot_data.csv",
            trace_plot_csv(traj, sc.cameras, trace, meta));
  const EntropyBound eb = check_entropy_bound(trace.final_belief());
  out << "trace " << num(eb.trace) << "\n"
      << "entropy " << num(eb.entropy) << " (bound " << num(eb.bound)
      << ")\n";
  return kOk;
}

RolloutReport evaluate(const Trajectory& traj, const Scenario& sc,
                       std::uint64_t seed, int n) {
  const BeliefTrace ml = propagate(traj, sc.cameras, sc.noise,
                                   AblationMask::full(), sc.prior,
                                   sc.propagation);
  std::vector<RolloutRow> rows;
  for (int k = 0; k < n; ++k) {
    Rng rng = make_rng(seed, 0, static_cast<std::uint64_t>(k) + 1);
    try {
      rows.push_back(rollout_noisy(traj, sc, rng).row);
    } catch (const Error& e) {
      RolloutRow row;
      row.ok = false;
      row.failure = e.what();
      rows.push_back(row);
    }
  }
  const Belief& b = ml.final_belief();
  return summarize(std::move(rows), b.covariance.trace(), entropy(b));
}

int cmd_rollout(const Options& o, std::ostream& out, std::ostream&) {
  if (o.rollouts < 1) throw Exit{kConfigError, "--rollouts must be >= 1"};
  const RunSettings s = load_settings(o);
  const Scenario sc = load_scenario_for(o, s);
  const Metadata meta{
      "rollout", sc.seed,
      resolved_config(s, &sc, ",\"rollouts\":" + std::to_string(o.rollouts))};

  std::vector<std::string> names{"baseline"};
  std::vector<Trajectory> trajs{make_baseline(sc)};
  if (!o.trajectory.empty()) {
    names.push_back("trajectory");
    trajs.push_back(initial_trajectory(o, sc));
  }
  std::vector<RolloutReport> reports;
  try {
    for (const Trajectory& t : trajs) {
      reports.push_back(evaluate(t, sc, sc.seed, o.rollouts));
    }
  } catch (const Error& e) {
    throw Exit{kOptimizationFailure,
               std::string("propagation failed: ") + e.what()};
  }
  write_out(o, "rollout.json", rollout_report_to_json(names, reports, meta));
  write_out(o, "trials.csv", trials_to_csv(names, reports, meta));
  for (size_t i = 0; i < reports.size(); ++i) {
    const RolloutReport& r = reports[i];
    out << names[i] << ": position " << num(r.position_mean) << " +- "
        << num(r.position_std) << ", orientation " << num(r.orientation_mean)
        << " +- " << num(r.orientation_std) << ", trace "
        << num(r.trace_mean) << " (ml " << num(r.ml_trace) << "), entropy "
        << num(r.entropy_mean) << " (ml " << num(r.ml_entropy)
        << "), failures " << r.failures << "/" << r.trials.size() << "\n";
  }
  return kOk;
}

std::vector<Variant> parse_variants(const std::string& list) {
  if (list.empty()) return standard_suite();
  std::vector<Variant> suite;
  std::set<std::string> seen;
  std::stringstream ss(list);
  std::string name;
  while (std::getline(ss, name, ',')) {
    if (!seen.insert(name).second) {
      throw Error(ErrorCode::kConfig, "duplicate variant '" + name + "'");
    }
    suite.push_back(variant_by_name(name));
  }
  if (suite.empty()) throw Error(ErrorCode::kConfig, "empty variant list");
  return suite;
}

int cmd_ablation(const Options& o, std::ostream& out, std::ostream& err) {
  if (o.scenarios < 1) throw Exit{kConfigError, "--scenarios must be >= 1"};
  if (o.rollouts < 1) throw Exit{kConfigError, "--rollouts must be >= 1"};
  if (o.parallel < 1) throw Exit{kConfigError, "--parallel must be >= 1"};
  const RunSettings s = load_settings(o);

  AblationOptions a;
  a.n_scenarios = o.scenarios;
  a.n_rollouts = o.rollouts;
  a.suite = parse_variants(o.variants);
  a.optimizer = s.optimizer;
  a.worst_case_factor = s.worst_case_factor;
  a.seed = o.seed.value_or(0);
  a.parallel = o.parallel;
  a.bounds = s.sampling;

  std::string names;
  for (const Variant& v : a.suite) {
    names += (names.empty() ? "\"" : ",\"") + v.name + "\"";
  }
  // --parallel is left out: it does not change any output.
  const Metadata meta{
      "ablation", a.seed,
      resolved_config(s, nullptr,
                      ",\"scenarios\":" + std::to_string(a.n_scenarios) +
                          ",\"rollouts\":" + std::to_string(a.n_rollouts) +
                          ",\"variants\":[" + names + "]")};

  const AblationResult r = run_ablation(a);
  write_out(o, "ablation.json", ablation_to_json(r, meta));
  write_out(o, "ablation.csv", ablation_table_csv(r, meta));
  write_out(o, "trials.csv", ablation_trials_csv(r, meta));
  write_out(o, "plot_data.csv", ablation_plot_csv(r, meta));

  out << "variant";
  for (int m = 0; m < kMetricCount; ++m) out << "," << metric_name(m);
  out << "\n";
  for (size_t v = 0; v < r.suite.size(); ++v) {
    out << r.suite[v].name;
    for (double x : r.relative[v]) out << "," << num(x);
    out << "\n";
  }
  out << "failed scenarios " << r.failed_scenarios << "/" << a.n_scenarios
      << "\n";
  for (const ScenarioOutcome& sc : r.scenarios) {
    if (!sc.ok) err << "scenario " << sc.index << ": " << sc.failure << "\n";
  }
  if (r.failed_scenarios * 10 > a.n_scenarios) {
    err << "more than 10% of scenarios failed\n";
    return kOptimizationFailure;
  }
  return kOk;
}

int cmd_gradcheck(const Options& o, std::ostream& out, std::ostream&) {
  const RunSettings s = load_settings(o);
  const Scenario sc = load_scenario_for(o, s);
  const Trajectory traj = initial_trajectory(o, sc);
  const PlanningProblem problem = sc.problem(s.mask, s.optimizer.pose_loss);

  std::vector<Vector6d> analytic, fd;
  try {
    analytic = gradient(traj, problem, GradientMode::kAnalytic);
    fd = gradient(traj, problem, GradientMode::kFiniteDifference,
                  s.optimizer.fd_step);
  } catch (const Error& e) {
    throw Exit{kOptimizationFailure,
               std::string("gradient evaluation failed: ") + e.what()};
  }
  if (o.corrupt_gradient && analytic.size() > 2) {
    double scale = 1.0;
    for (const Vector6d& g : fd) scale = std::max(scale, g.cwiseAbs().maxCoeff());
    analytic[1](0) += 1e-2 * scale;
  }
  const double e = max_relative_error(analytic, fd);
  out << "max relative error " << num(e) << " (tolerance "
      << num(kGradientTolerance) << ")\n";
  if (!(e <= kGradientTolerance)) {
    out << "gradient mismatch\n";
    return kGradientMismatch;
  }
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Uncertainty-aware trajectory optimization", "uatraj"};
  app.require_subcommand(1);
  Options o;

  auto add_scenario = [&](CLI::App* c) {
    c->add_option("--scenario", o.scenario, "Scenario JSON file");
    c->add_option("--trajectory", o.trajectory,
                  "Trajectory JSON (default: interpolation baseline)");
  };
  auto add_common = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output directory");
    c->add_option("--seed", o.seed, "Random seed");
    c->add_option("--config", o.config, "Run settings JSON file");
  };

  CLI::App* optimize_cmd = app.add_subcommand("optimize", "Optimize a trajectory");
  add_scenario(optimize_cmd);
  add_common(optimize_cmd);
  optimize_cmd->add_option("--grad-mode", o.grad_mode, "analytic or fd")
      ->check(CLI::IsMember({"analytic", "fd"}));

  CLI::App* rollout_cmd =
      app.add_subcommand("rollout", "Noisy rollouts of the baseline and a trajectory");
  add_scenario(rollout_cmd);
  add_common(rollout_cmd);
  rollout_cmd->add_option("--rollouts", o.rollouts, "Number of noisy rollouts");

  CLI::App* ablation_cmd = app.add_subcommand("ablation", "Ablation study");
  add_common(ablation_cmd);
  ablation_cmd->add_option("--scenarios", o.scenarios, "Number of scenarios");
  ablation_cmd->add_option("--rollouts", o.rollouts, "Rollouts per variant");
  ablation_cmd->add_option("--variants", o.variants,
                           "Comma-separated variant names");
  ablation_cmd->add_option("--parallel", o.parallel, "Worker threads");
  ablation_cmd->add_option("--grad-mode", o.grad_mode, "analytic or fd")
      ->check(CLI::IsMember({"analytic", "fd"}));

  CLI::App* propagate_cmd =
      app.add_subcommand("propagate", "Maximum-likelihood belief propagation");
  add_scenario(propagate_cmd);
  add_common(propagate_cmd);

  CLI::App* gradcheck_cmd =
      app.add_subcommand("gradcheck", "Compare analytic and finite-difference gradients");
  add_scenario(gradcheck_cmd);
  add_common(gradcheck_cmd);
  gradcheck_cmd->add_flag("--corrupt-gradient", o.corrupt_gradient)
      ->group("");  // test hook, hidden from --help

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (*optimize_cmd) return cmd_optimize(o, out, err);
    if (*rollout_cmd) return cmd_rollout(o, out, err);
    if (*ablation_cmd) return cmd_ablation(o, out, err);
    if (*propagate_cmd) return cmd_propagate(o, out, err);
    if (*gradcheck_cmd) return cmd_gradcheck(o, out, err);
  } catch (const Exit& e) {
    err << "error: " << e.message << "\n";
    return e.code;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return e.code() == ErrorCode::kConfig ? kConfigError
                                          : kOptimizationFailure;
  }
  return kUsage;
}

}  // namespace uatraj::cli
