// Copyright 2026 The nashdyn Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Command-line front end: reproducible runs of the exact evaluator, the
// score dynamics, the sample-based optimizer, baselines and the scan tools,
// all emitting CSV artifacts plus a JSON manifest per run.
//
// Exit codes: 0 success (non-convergence is data, not failure), 2 usage,
// 3 I/O or malformed input, 4 semantic validation failure.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "nashdyn/nashdyn.hpp"

namespace {

using nashdyn::DynamicsConfig;
using nashdyn::MarkovGame;
using nashdyn::Matrix;
using nashdyn::PolicyProfile;
using nashdyn::TableSet;
using nashdyn::TraceOptions;
using nashdyn::Vector;

constexpr int kExitSuccess = 0;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitValidation = 4;

// ---------------------------------------------------------------------------
// game selection

struct GameOptions {
  std::string builtin = "matching-pennies";
  std::string file;
  double gamma = 0.9;
  int cournot_players = 2;
};

void add_game_options(CLI::App* cmd, GameOptions* opts) {
  cmd->add_option("--game", opts->builtin,
                  "builtin game: matching-pennies, biased-matching-pennies, "
                  "soccer, cournot")
      ->default_str(opts->builtin);
  cmd->add_option("--game-file", opts->file,
                  "JSON game file (overrides --game)")
      ->check(CLI::ExistingFile);
  cmd->add_option("--gamma", opts->gamma, "discount for builtin games")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  cmd->add_option("--players", opts->cournot_players,
                  "number of firms (cournot only)")
      ->check(CLI::Range(1, 6));
}

MarkovGame make_game(const GameOptions& opts) {
  if (!opts.file.empty()) return nashdyn::load_game(opts.file);
  if (opts.builtin == "matching-pennies") {
    return nashdyn::build_matching_pennies(opts.gamma);
  }
  if (opts.builtin == "biased-matching-pennies") {
    return nashdyn::build_biased_matching_pennies(opts.gamma);
  }
  if (opts.builtin == "soccer") return nashdyn::build_soccer(opts.gamma);
  if (opts.builtin == "cournot") {
    return nashdyn::build_cournot(opts.cournot_players, opts.gamma);
  }
  throw CLI::ValidationError("--game", "unknown builtin '" + opts.builtin +
                                           "'");
}

nlohmann::json game_manifest(const GameOptions& opts) {
  nlohmann::json j;
  if (!opts.file.empty()) {
    j["file"] = opts.file;
  } else {
    j["builtin"] = opts.builtin;
    j["gamma"] = opts.gamma;
    if (opts.builtin == "cournot") j["players"] = opts.cournot_players;
  }
  return j;
}

// ---------------------------------------------------------------------------
// profiles and score tables on disk

PolicyProfile load_profile(const std::string& path, const MarkovGame& game) {
  std::ifstream in(path);
  if (!in) throw nashdyn::ParseError("cannot open profile file: " + path);
  nlohmann::json root;
  try {
    root = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw nashdyn::ParseError(std::string("invalid profile JSON: ") +
                              e.what());
  }
  if (!root.contains("policies") || !root["policies"].is_array() ||
      static_cast<int>(root["policies"].size()) != game.num_players) {
    throw nashdyn::ParseError(
        "profile must hold 'policies', one matrix per player");
  }
  PolicyProfile profile(game.num_players);
  for (int i = 0; i < game.num_players; ++i) {
    const auto& block = root["policies"][i];
    if (!block.is_array() ||
        static_cast<int>(block.size()) != game.num_states) {
      throw nashdyn::ParseError("policies[" + std::to_string(i) +
                                "] must have one row per state");
    }
    profile[i].resize(game.num_states, game.action_counts[i]);
    for (int s = 0; s < game.num_states; ++s) {
      const auto& row = block[s];
      if (!row.is_array() ||
          static_cast<int>(row.size()) != game.action_counts[i]) {
        throw nashdyn::ParseError("policies[" + std::to_string(i) + "][" +
                                  std::to_string(s) +
                                  "] has the wrong number of actions");
      }
      for (int a = 0; a < game.action_counts[i]; ++a) {
        if (!row[a].is_number()) {
          throw nashdyn::ParseError("profile entries must be numbers");
        }
        profile[i](s, a) = row[a].get<double>();
      }
      const double sum = profile[i].row(s).sum();
      if (std::abs(sum - 1.0) > 1e-9 || profile[i].row(s).minCoeff() < 0.0) {
        throw nashdyn::ValidationError(
            "profile row off the simplex: player " + std::to_string(i) +
            " state " + std::to_string(s));
      }
    }
  }
  return profile;
}

void save_profile(const std::string& path, const PolicyProfile& profile) {
  nlohmann::json root;
  nlohmann::json policies = nlohmann::json::array();
  for (const Matrix& p : profile) {
    nlohmann::json block = nlohmann::json::array();
    for (Eigen::Index s = 0; s < p.rows(); ++s) {
      nlohmann::json row = nlohmann::json::array();
      for (Eigen::Index a = 0; a < p.cols(); ++a) row.push_back(p(s, a));
      block.push_back(row);
    }
    policies.push_back(block);
  }
  root["policies"] = policies;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write profile file: " + path);
  out << root.dump(1) << "\n";
}

// Zero score tables, optionally perturbed entrywise by uniform(-p, p).
TableSet initial_scores(const MarkovGame& game, double perturb,
                        std::uint64_t seed) {
  TableSet y0 = nashdyn::zero_tables(game);
  if (perturb > 0.0) {
    nashdyn::Rng rng(nashdyn::derive_seed(seed, 0x9e1cu));
    for (auto& table : y0) {
      for (Eigen::Index s = 0; s < table.rows(); ++s) {
        for (Eigen::Index a = 0; a < table.cols(); ++a) {
          table(s, a) = rng.uniform(-perturb, perturb);
        }
      }
    }
  }
  return y0;
}

// ---------------------------------------------------------------------------
// run plumbing

struct OutputOptions {
  std::string dir = ".";
  std::string prefix;
  bool timing = false;  // include wall-clock columns (breaks byte identity)
};

void add_output_options(CLI::App* cmd, OutputOptions* opts,
                        const std::string& default_prefix) {
  cmd->add_option("--out-dir", opts->dir,
                  "output directory for artifacts (env NASHDYN_OUT)")
      ->envname("NASHDYN_OUT");
  cmd->add_option("--prefix", opts->prefix, "artifact filename prefix")
      ->default_str(default_prefix);
  cmd->add_flag("--timing", opts->timing,
                "emit wall-clock times (off by default so reruns are "
                "byte-identical)");
}

std::string artifact_path(const OutputOptions& out, const std::string& name) {
  std::filesystem::create_directories(out.dir);
  return (std::filesystem::path(out.dir) / (out.prefix + "_" + name))
      .string();
}

void strip_wall_clock(std::vector<nashdyn::TraceRecord>& records) {
  for (auto& rec : records) {
    rec.wall_ms = std::numeric_limits<double>::quiet_NaN();
  }
}

void write_manifest(const OutputOptions& out, const std::string& command,
                    nlohmann::json config,
                    const std::vector<std::string>& artifacts) {
  nlohmann::json manifest;
  manifest["command"] = command;
  manifest["config"] = std::move(config);
  nlohmann::json files = nlohmann::json::array();
  for (const auto& a : artifacts) {
    files.push_back(std::filesystem::path(a).filename().string());
  }
  manifest["artifacts"] = files;
  const std::string path = artifact_path(out, "manifest.json");
  std::ofstream stream(path);
  if (!stream) throw std::runtime_error("cannot write manifest: " + path);
  stream << manifest.dump(1) << "\n";
}

// ---------------------------------------------------------------------------
// dynamics option block shared by ctld / dtld / epo-tab

struct DynOptions {
  DynamicsConfig config;
  double y0_perturb = 0.0;
  std::uint64_t seed = 0;
  long record_every = 1;
  long nashconv_every = 0;
};

void add_dynamics_options(CLI::App* cmd, DynOptions* opts, bool continuous) {
  cmd->add_option("--epsilon", opts->config.epsilon, "entropic temperature")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--eta", opts->config.eta, "learning rate")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--fp-tol", opts->config.fp_tol,
                  "fixed-point residual target")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", opts->config.max_iters, "iteration budget")
      ->check(CLI::PositiveNumber);
  if (continuous) {
    cmd->add_option("--step", opts->config.step, "RK4 step size")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-time", opts->config.max_time,
                    "dynamics time budget")
        ->check(CLI::PositiveNumber);
  } else {
    cmd->add_option("--alpha0", opts->config.alpha0,
                    "step-size schedule numerator")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--schedule-p", opts->config.schedule_p,
                    "step-size exponent in (0.5, 1]")
        ->check(CLI::Range(0.5 + 1e-9, 1.0));
    cmd->add_option("--schedule-offset", opts->config.schedule_offset,
                    "step-size schedule offset")
        ->check(CLI::PositiveNumber);
  }
  cmd->add_option("--y0-perturb", opts->y0_perturb,
                  "uniform(-p, p) perturbation of the zero start scores")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--seed", opts->seed, "run seed");
  cmd->add_option("--record-every", opts->record_every,
                  "trace cadence in steps")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--nashconv-every", opts->nashconv_every,
                  "NashConv cadence in steps (0: final record only)");
}

nlohmann::json dynamics_manifest(const DynOptions& opts, bool continuous) {
  nlohmann::json j;
  j["epsilon"] = opts.config.epsilon;
  j["eta"] = opts.config.eta;
  j["fp_tol"] = opts.config.fp_tol;
  j["max_iters"] = opts.config.max_iters;
  if (continuous) {
    j["step"] = opts.config.step;
    j["max_time"] = opts.config.max_time;
  } else {
    j["alpha0"] = opts.config.alpha0;
    j["schedule_p"] = opts.config.schedule_p;
    j["schedule_offset"] = opts.config.schedule_offset;
  }
  j["y0_perturb"] = opts.y0_perturb;
  j["seed"] = opts.seed;
  j["record_every"] = opts.record_every;
  j["nashconv_every"] = opts.nashconv_every;
  return j;
}

void report_run(const nashdyn::DynamicsRun& run) {
  std::cout << "status: " << nashdyn::to_string(run.trace.status)
            << "  residual: " << run.residual
            << "  records: " << run.trace.records.size() << "\n";
  if (!run.trace.records.empty() &&
      !std::isnan(run.trace.records.back().nashconv)) {
    std::cout << "final nashconv: " << run.trace.records.back().nashconv
              << "\n";
  }
}

// ---------------------------------------------------------------------------
// subcommands

int cmd_eval(const GameOptions& game_opts, const OutputOptions& out,
             const std::string& profile_path) {
  const MarkovGame game = make_game(game_opts);
  const PolicyProfile profile = profile_path.empty()
                                    ? nashdyn::uniform_profile(game)
                                    : load_profile(profile_path, game);
  const nashdyn::EvalReport report = nashdyn::evaluate(game, profile);
  const std::string csv = artifact_path(out, "eval.csv");
  nashdyn::write_eval_csv(csv, game, report);

  nlohmann::json config;
  config["game"] = game_manifest(game_opts);
  config["profile"] = profile_path.empty() ? "uniform" : profile_path;
  write_manifest(out, "eval", config, {csv});
  for (int i = 0; i < game.num_players; ++i) {
    std::cout << "u[" << i << "] = " << report.payoffs[i] << "\n";
  }
  std::cout << "wrote " << csv << "\n";
  return kExitSuccess;
}

int cmd_ctld(const GameOptions& game_opts, const OutputOptions& out,
             const DynOptions& dyn, const std::string& save_profile_path) {
  const MarkovGame game = make_game(game_opts);
  const TableSet y0 = initial_scores(game, dyn.y0_perturb, dyn.seed);
  TraceOptions trace;
  trace.record_every = dyn.record_every;
  trace.nashconv_every = dyn.nashconv_every;
  nashdyn::DynamicsRun run = nashdyn::run_ctld(game, y0, dyn.config, trace);
  if (!out.timing) strip_wall_clock(run.trace.records);

  const std::string csv = artifact_path(out, "trace.csv");
  nashdyn::write_trace_csv(csv, run.trace.records);
  std::vector<std::string> artifacts = {csv};
  if (!save_profile_path.empty()) {
    save_profile(save_profile_path, run.profile);
    artifacts.push_back(save_profile_path);
  }
  nlohmann::json config;
  config["game"] = game_manifest(game_opts);
  config["dynamics"] = dynamics_manifest(dyn, true);
  config["status"] = nashdyn::to_string(run.trace.status);
  write_manifest(out, "ctld", config, artifacts);
  report_run(run);
  return kExitSuccess;
}

int cmd_dtld(const GameOptions& game_opts, const OutputOptions& out,
             const DynOptions& dyn, const std::string& save_profile_path) {
  const MarkovGame game = make_game(game_opts);
  const TableSet y0 = initial_scores(game, dyn.y0_perturb, dyn.seed);
  TraceOptions trace;
  trace.record_every = dyn.record_every;
  trace.nashconv_every = dyn.nashconv_every;
  nashdyn::DynamicsRun run =
      nashdyn::run_dtld_exact(game, y0, dyn.config, trace);
  if (!out.timing) strip_wall_clock(run.trace.records);

  const std::string csv = artifact_path(out, "trace.csv");
  nashdyn::write_trace_csv(csv, run.trace.records);
  std::vector<std::string> artifacts = {csv};
  if (!save_profile_path.empty()) {
    save_profile(save_profile_path, run.profile);
    artifacts.push_back(save_profile_path);
  }
  nlohmann::json config;
  config["game"] = game_manifest(game_opts);
  config["dynamics"] = dynamics_manifest(dyn, false);
  config["status"] = nashdyn::to_string(run.trace.status);
  write_manifest(out, "dtld", config, artifacts);
  report_run(run);
  return kExitSuccess;
}

struct EpoCliOptions {
  long episodes = 64;
  int horizon = 0;  // 0: derive from gamma
  double lambda = 0.95;
  std::string mode = "unbiased";
  int window = 0;
  int workers = 0;  // 0: hardware
};

int cmd_epo_tab(const GameOptions& game_opts, const OutputOptions& out,
                const DynOptions& dyn, const EpoCliOptions& epo_cli,
                const std::string& save_profile_path) {
  const MarkovGame game = make_game(game_opts);
  nashdyn::EpoOptions options;
  options.episodes_per_iter = epo_cli.episodes;
  options.horizon = epo_cli.horizon > 0
                        ? epo_cli.horizon
                        : nashdyn::default_horizon(game.gamma);
  options.lambda = epo_cli.lambda;
  options.buffer_window = epo_cli.window;
  options.seed = dyn.seed;
  options.workers = epo_cli.workers > 0 ? epo_cli.workers
                                        : nashdyn::default_workers();
  options.trace.record_every = dyn.record_every;
  options.trace.nashconv_every = dyn.nashconv_every;
  if (epo_cli.mode == "unbiased") {
    options.mode = nashdyn::EpoMode::kUnbiased;
  } else if (epo_cli.mode == "gae") {
    options.mode = nashdyn::EpoMode::kGae;
  } else if (epo_cli.mode == "exact") {
    options.mode = nashdyn::EpoMode::kExact;
  } else {
    throw CLI::ValidationError("--mode",
                               "expected unbiased, gae or exact, got '" +
                                   epo_cli.mode + "'");
  }

  const TableSet y0 = initial_scores(game, dyn.y0_perturb, dyn.seed);
  nashdyn::EpoRun run = nashdyn::run_tabular_epo(game, dyn.config, options,
                                                 y0);
  if (!out.timing) strip_wall_clock(run.trace.records);

  std::ostringstream extra_cells;
  extra_cells << ',' << options.episodes_per_iter << ',' << options.horizon
              << ',' << nashdyn::to_string(options.mode) << ','
              << options.seed;
  const std::string csv = artifact_path(out, "trace.csv");
  nashdyn::write_trace_csv(csv, run.trace.records, ",M,H,mode,seed",
                           extra_cells.str());
  std::vector<std::string> artifacts = {csv};
  if (!save_profile_path.empty()) {
    save_profile(save_profile_path, run.profile);
    artifacts.push_back(save_profile_path);
  }
  nlohmann::json config;
  config["game"] = game_manifest(game_opts);
  config["dynamics"] = dynamics_manifest(dyn, false);
  config["episodes_per_iter"] = options.episodes_per_iter;
  config["horizon"] = options.horizon;
  config["lambda"] = options.lambda;
  config["mode"] = nashdyn::to_string(options.mode);
  config["buffer_window"] = options.buffer_window;
  config["workers"] = options.workers;
  config["status"] = nashdyn::to_string(run.trace.status);
  write_manifest(out, "epo-tab", config, artifacts);
  std::cout << "status: " << nashdyn::to_string(run.trace.status) << "\n";
  if (!run.trace.records.empty() &&
      !std::isnan(run.trace.records.back().nashconv)) {
    std::cout << "final nashconv: " << run.trace.records.back().nashconv
              << "\n";
  }
  return kExitSuccess;
}

int cmd_baseline(const GameOptions& game_opts, const OutputOptions& out,
                 const std::string& algorithm, int iters, double br_tol) {
  const MarkovGame game = make_game(game_opts);
  const PolicyProfile start = nashdyn::pure_profile(
      game, std::vector<int>(game.num_players, 0));
  nashdyn::BaselineRun run;
  if (algorithm == "ibr") {
    run = nashdyn::run_ibr(game, start, iters, br_tol);
  } else if (algorithm == "fp") {
    run = nashdyn::run_fp(game, start, iters, br_tol);
  } else {
    throw CLI::ValidationError("--alg", "expected ibr or fp, got '" +
                                            algorithm + "'");
  }
  const std::string csv = artifact_path(out, "trace.csv");
  nashdyn::write_baseline_csv(csv, run);
  nlohmann::json config;
  config["game"] = game_manifest(game_opts);
  config["algorithm"] = algorithm;
  config["iters"] = iters;
  config["br_tol"] = br_tol;
  write_manifest(out, "baseline", config, {csv});
  std::cout << "final nashconv: " << run.nashconv.back() << "\n";
  return kExitSuccess;
}

int cmd_nashconv(const GameOptions& game_opts, const OutputOptions& out,
                 const std::string& profile_path, double br_tol) {
  const MarkovGame game = make_game(game_opts);
  const PolicyProfile profile = profile_path.empty()
                                    ? nashdyn::uniform_profile(game)
                                    : load_profile(profile_path, game);
  const nashdyn::NashConvReport report =
      nashdyn::nash_conv(game, profile, br_tol);
  const std::string csv = artifact_path(out, "nashconv.csv");
  nashdyn::write_nashconv_csv(csv, {report});
  nlohmann::json config;
  config["game"] = game_manifest(game_opts);
  config["profile"] = profile_path.empty() ? "uniform" : profile_path;
  config["br_tol"] = br_tol;
  write_manifest(out, "nashconv", config, {csv});
  std::cout << "nashconv: " << report.total << "\n";
  return kExitSuccess;
}

int cmd_mu_scan(const GameOptions& game_opts, const OutputOptions& out,
                long samples, std::uint64_t seed, int workers, int bins,
                bool dump_samples) {
  const MarkovGame game = make_game(game_opts);
  const nashdyn::Prop1Report report = nashdyn::proposition1_probe(
      game, samples, seed,
      workers > 0 ? workers : nashdyn::default_workers());
  const std::string hist_csv = artifact_path(out, "mu_histogram.csv");
  nashdyn::write_mu_histogram_csv(hist_csv, report.scan, bins);
  std::vector<std::string> artifacts = {hist_csv};
  if (dump_samples) {
    const std::string samples_csv = artifact_path(out, "mu_samples.csv");
    nashdyn::write_mu_samples_csv(samples_csv, report.scan);
    artifacts.push_back(samples_csv);
  }
  nlohmann::json config;
  config["game"] = game_manifest(game_opts);
  config["samples"] = samples;
  config["seed"] = seed;
  config["bins"] = bins;
  config["max_inner"] = report.scan.max_inner;
  config["max_norm"] = report.scan.max_norm;
  config["all_finite"] = report.all_finite;
  config["analytic_bound"] = report.analytic_bound;
  write_manifest(out, "mu-scan", config, artifacts);
  std::cout << "max_inner: " << report.scan.max_inner
            << "  max_norm: " << report.scan.max_norm << "\n";
  return kExitSuccess;
}

int cmd_sweep(const GameOptions& game_opts, const OutputOptions& out,
              const DynOptions& dyn, const std::vector<double>& epsilons) {
  const MarkovGame game = make_game(game_opts);
  const TableSet y0 = initial_scores(game, dyn.y0_perturb, dyn.seed);
  TraceOptions trace;
  trace.record_every = dyn.record_every;
  const std::vector<nashdyn::SweepRow> rows =
      nashdyn::epsilon_sweep(game, epsilons, dyn.config, y0, trace);
  const std::string csv = artifact_path(out, "sweep.csv");
  nashdyn::write_sweep_csv(csv, rows);
  nlohmann::json config;
  config["game"] = game_manifest(game_opts);
  config["dynamics"] = dynamics_manifest(dyn, true);
  config["epsilons"] = epsilons;
  write_manifest(out, "sweep", config, {csv});
  for (const auto& row : rows) {
    std::cout << "epsilon " << row.epsilon << ": nashconv " << row.nashconv
              << " (" << nashdyn::to_string(row.status) << ")\n";
  }
  return kExitSuccess;
}

int cmd_gen(const OutputOptions& out, const nashdyn::RandomGameParams& params,
            const std::string& file_name, bool explicit_file) {
  const MarkovGame game = nashdyn::gen_random_game(params);
  std::filesystem::create_directories(out.dir);
  const std::string path =
      explicit_file ? (std::filesystem::path(out.dir) / file_name).string()
                    : artifact_path(out, file_name);
  nashdyn::save_game(game, path);
  nlohmann::json config;
  config["seed"] = params.seed;
  config["players"] = params.num_players;
  config["states"] = params.num_states;
  config["action_counts"] = params.action_counts;
  config["reward_min"] = params.reward_min;
  config["reward_max"] = params.reward_max;
  config["gamma"] = params.gamma;
  write_manifest(out, "gen", config, {path});
  std::cout << "wrote " << path << "\n";
  return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"tabular Markov-game toolkit: exact evaluation, entropic "
               "score dynamics, sample-based optimization, baselines and "
               "monotonicity scans"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML config file (flags take precedence)");
  app.get_config_formatter_base()->comment('#');

  GameOptions game_opts;
  OutputOptions out_opts;
  DynOptions dyn_opts;

  // eval
  std::string profile_path;
  CLI::App* eval = app.add_subcommand(
      "eval", "exact evaluation of a profile (CSV of rho, V, Q, A, w, u)");
  add_game_options(eval, &game_opts);
  add_output_options(eval, &out_opts, "eval");
  eval->add_option("--profile", profile_path,
                   "profile JSON (default: uniform)")
      ->check(CLI::ExistingFile);

  // ctld
  std::string save_profile_path;
  CLI::App* ctld = app.add_subcommand(
      "ctld", "integrate the continuous-time score dynamics (RK4)");
  add_game_options(ctld, &game_opts);
  add_output_options(ctld, &out_opts, "ctld");
  add_dynamics_options(ctld, &dyn_opts, /*continuous=*/true);
  ctld->add_option("--save-profile", save_profile_path,
                   "write the converged profile to this JSON file");

  // dtld
  CLI::App* dtld = app.add_subcommand(
      "dtld", "iterate the exact discrete-time score dynamics");
  add_game_options(dtld, &game_opts);
  add_output_options(dtld, &out_opts, "dtld");
  add_dynamics_options(dtld, &dyn_opts, /*continuous=*/false);
  dtld->add_option("--save-profile", save_profile_path,
                   "write the converged profile to this JSON file");

  // epo-tab
  EpoCliOptions epo_cli;
  CLI::App* epo = app.add_subcommand(
      "epo-tab", "sample-based discrete dynamics (tabular optimizer)");
  add_game_options(epo, &game_opts);
  add_output_options(epo, &out_opts, "epo");
  add_dynamics_options(epo, &dyn_opts, /*continuous=*/false);
  epo->add_option("--episodes", epo_cli.episodes, "episodes per iteration")
      ->check(CLI::PositiveNumber);
  epo->add_option("--horizon", epo_cli.horizon,
                  "episode horizon (0: derive from gamma)")
      ->check(CLI::NonNegativeNumber);
  epo->add_option("--lambda", epo_cli.lambda, "GAE lambda")
      ->check(CLI::Range(0.0, 1.0));
  epo->add_option("--mode", epo_cli.mode, "unbiased, gae or exact");
  epo->add_option("--window", epo_cli.window,
                  "iteration window for value/w estimates (0: full history "
                  "values, current-iteration w)")
      ->check(CLI::NonNegativeNumber);
  epo->add_option("--workers", epo_cli.workers,
                  "rollout workers (0: hardware)")
      ->check(CLI::NonNegativeNumber);
  epo->add_option("--save-profile", save_profile_path,
                  "write the final profile to this JSON file");

  // baseline
  std::string algorithm = "ibr";
  int baseline_iters = 100;
  double br_tol = 1e-10;
  CLI::App* baseline = app.add_subcommand(
      "baseline", "iterated best response / fictitious play");
  add_game_options(baseline, &game_opts);
  add_output_options(baseline, &out_opts, "baseline");
  baseline->add_option("--alg", algorithm, "ibr or fp");
  baseline->add_option("--iters", baseline_iters, "iterations")
      ->check(CLI::PositiveNumber);
  baseline->add_option("--br-tol", br_tol, "best-response tolerance")
      ->check(CLI::PositiveNumber);

  // nashconv
  CLI::App* nashconv = app.add_subcommand(
      "nashconv", "NashConv of a profile via exact best responses");
  add_game_options(nashconv, &game_opts);
  add_output_options(nashconv, &out_opts, "nashconv");
  nashconv->add_option("--profile", profile_path,
                       "profile JSON (default: uniform)")
      ->check(CLI::ExistingFile);
  nashconv->add_option("--br-tol", br_tol, "best-response tolerance")
      ->check(CLI::PositiveNumber);

  // mu-scan
  long scan_samples = 1000;
  std::uint64_t scan_seed = 0;
  int scan_workers = 0;
  int scan_bins = 40;
  bool scan_dump_samples = false;
  CLI::App* mu_scan = app.add_subcommand(
      "mu-scan", "hypomonotonicity scan over random profile pairs");
  add_game_options(mu_scan, &game_opts);
  add_output_options(mu_scan, &out_opts, "mu");
  mu_scan->add_option("--samples", scan_samples, "profile pairs to draw")
      ->check(CLI::PositiveNumber);
  mu_scan->add_option("--seed", scan_seed, "scan seed");
  mu_scan->add_option("--workers", scan_workers, "workers (0: hardware)")
      ->check(CLI::NonNegativeNumber);
  mu_scan->add_option("--bins", scan_bins, "histogram bins")
      ->check(CLI::PositiveNumber);
  mu_scan->add_flag("--dump-samples", scan_dump_samples,
                    "also write the raw sample CSV");

  // sweep
  std::vector<double> sweep_epsilons;
  CLI::App* sweep = app.add_subcommand(
      "sweep", "run the continuous dynamics across a list of epsilons");
  add_game_options(sweep, &game_opts);
  add_output_options(sweep, &out_opts, "sweep");
  add_dynamics_options(sweep, &dyn_opts, /*continuous=*/true);
  sweep->add_option("--epsilons", sweep_epsilons, "epsilon values")
      ->required()
      ->delimiter(',');

  // gen
  nashdyn::RandomGameParams gen_params;
  std::string gen_file = "game.json";
  CLI::App* gen = app.add_subcommand("gen", "generate a random game file");
  add_output_options(gen, &out_opts, "gen");
  gen->add_option("--seed", gen_params.seed, "generator seed");
  gen->add_option("--gen-players", gen_params.num_players, "players")
      ->check(CLI::Range(1, 6));
  gen->add_option("--states", gen_params.num_states, "states")
      ->check(CLI::PositiveNumber);
  gen->add_option("--actions", gen_params.action_counts,
                  "action counts, one per player")
      ->delimiter(',');
  gen->add_option("--reward-min", gen_params.reward_min, "reward lower bound");
  gen->add_option("--reward-max", gen_params.reward_max, "reward upper bound");
  gen->add_option("--gen-gamma", gen_params.gamma, "discount")
      ->check(CLI::Range(1e-9, 1.0 - 1e-9));
  gen->add_option("--file", gen_file,
                  "output file name (default <prefix>_game.json)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }

  const auto with_prefix = [&out_opts](const std::string& fallback) {
    if (out_opts.prefix.empty()) out_opts.prefix = fallback;
  };
  try {
    if (eval->parsed()) {
      with_prefix("eval");
      return cmd_eval(game_opts, out_opts, profile_path);
    }
    if (ctld->parsed()) {
      with_prefix("ctld");
      return cmd_ctld(game_opts, out_opts, dyn_opts, save_profile_path);
    }
    if (dtld->parsed()) {
      with_prefix("dtld");
      return cmd_dtld(game_opts, out_opts, dyn_opts, save_profile_path);
    }
    if (epo->parsed()) {
      with_prefix("epo");
      return cmd_epo_tab(game_opts, out_opts, dyn_opts, epo_cli,
                         save_profile_path);
    }
    if (baseline->parsed()) {
      with_prefix("baseline");
      return cmd_baseline(game_opts, out_opts, algorithm, baseline_iters,
                          br_tol);
    }
    if (nashconv->parsed()) {
      with_prefix("nashconv");
      return cmd_nashconv(game_opts, out_opts, profile_path, br_tol);
    }
    if (mu_scan->parsed()) {
      with_prefix("mu");
      return cmd_mu_scan(game_opts, out_opts, scan_samples, scan_seed,
                         scan_workers, scan_bins, scan_dump_samples);
    }
    if (sweep->parsed()) {
      with_prefix("sweep");
      return cmd_sweep(game_opts, out_opts, dyn_opts, sweep_epsilons);
    }
    if (gen->parsed()) {
      with_prefix("gen");
      return cmd_gen(out_opts, gen_params, gen_file,
                     gen->count("--file") > 0);
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const nashdyn::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nashdyn::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitUsage;
}
