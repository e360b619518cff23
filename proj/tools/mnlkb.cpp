// Copyright 2026 The mnlkb Authors
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

// Command-line entry point: run | opt | diagnose.
//
// Exit codes: 0 success, 1 configuration error, 2 runtime failure,
// 3 diagnostic failure.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "mnlkb/config.hpp"
#include "mnlkb/errors.hpp"
#include "mnlkb/harness.hpp"
#include "mnlkb/io.hpp"
#include "mnlkb/planner.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kOk = 0;
constexpr int kConfigFailure = 1;
constexpr int kRuntimeFailure = 2;
constexpr int kDiagnosticFailure = 3;

void warn_about_omega(const mnlkb::ExperimentResult& result) {
  for (const auto& s : result.stats) {
    if (s.omega_clamped_runs > 0) {
      std::cerr << "warning: " << s.policy
                << ": shrinkage factor clamped; the regret guarantee does not "
                   "apply at this inventory level\n";
    }
  }
}

void print_report(const mnlkb::DiagnosticReport& report) {
  for (const auto& c : report.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " statistic="
              << mnlkb::format_number(c.statistic) << " band=["
              << mnlkb::format_number(c.lower) << ", "
              << mnlkb::format_number(c.upper) << "] " << c.detail << '\n';
  }
}

int cmd_run(const std::string& config_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, std::optional<int> reps) {
  auto cfg = mnlkb::load_config(config_path);
  if (seed) cfg.seed = *seed;
  if (reps) cfg.replications = *reps;
  cfg.validate();
  const fs::path out(out_dir);
  fs::create_directories(out);
  try {
    const auto result = mnlkb::run_experiment(cfg);
    warn_about_omega(result);
    mnlkb::write_file_atomic(out / "runs.csv", mnlkb::runs_csv(result));
    if (cfg.write_epochs) {
      mnlkb::write_file_atomic(out / "epochs.csv", mnlkb::epochs_csv(result));
    }
    std::optional<mnlkb::DiagnosticReport> report;
    if (cfg.diagnostics.any()) report = mnlkb::diagnostics(cfg);
    std::optional<mnlkb::ScalingResult> scaling;
    if (!cfg.horizons.empty()) {
      scaling = mnlkb::regret_scaling(cfg, cfg.horizons);
      mnlkb::write_file_atomic(out / "regret_scaling.csv",
                               mnlkb::scaling_csv(*scaling));
      mnlkb::write_file_atomic(out / "regret_curve.svg",
                               mnlkb::regret_svg(*scaling));
    }
    mnlkb::write_file_atomic(
        out / "diagnostics.json",
        mnlkb::diagnostics_json(&result, report ? &*report : nullptr,
                                scaling ? &*scaling : nullptr));
    for (const auto& s : result.stats) {
      std::cout << s.policy << ": mean revenue "
                << mnlkb::format_number(s.mean_revenue) << " (se "
                << mnlkb::format_number(s.se_revenue) << "), mean regret "
                << mnlkb::format_number(s.mean_regret) << ", OPT "
                << mnlkb::format_number(result.opt) << '\n';
    }
    if (report) {
      print_report(*report);
      if (!report->all_passed()) return kDiagnosticFailure;
    }
    return kOk;
  } catch (const mnlkb::ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    const fs::path dump = out / "abort.txt";
    mnlkb::write_file_atomic(
        dump, std::string("run aborted: ") + e.what() + "\nconfig: " +
                  config_path + "\nseed: " + std::to_string(cfg.seed) + "\n");
    std::cerr << "error: " << e.what() << " (details in " << dump.string()
              << ")\n";
    return kRuntimeFailure;
  }
}

int cmd_opt(const std::string& config_path) {
  const auto cfg = mnlkb::load_config(config_path);
  if (!cfg.instance) {
    throw mnlkb::ConfigError("opt needs an explicit instance, not a generator");
  }
  const auto res = mnlkb::solve_opt_lp(*cfg.instance);
  std::cout << "opt_lp_value," << mnlkb::format_number(res.value) << '\n'
            << "opt," << mnlkb::format_number(res.opt) << '\n'
            << mnlkb::distribution_csv(res.distribution);
  return kOk;
}

int cmd_diagnose(const std::string& config_path,
                 const std::optional<std::string>& out_dir) {
  const auto cfg = mnlkb::load_config(config_path);
  const auto report = mnlkb::diagnostics(cfg);
  print_report(report);
  if (out_dir) {
    fs::create_directories(*out_dir);
    mnlkb::write_file_atomic(fs::path(*out_dir) / "diagnostics.json",
                             mnlkb::diagnostics_json(nullptr, &report, nullptr));
  }
  if (!report.all_passed()) {
    std::cerr << "failed checks:";
    for (const auto& c : report.checks) {
      if (!c.passed) std::cerr << ' ' << c.name;
    }
    std::cerr << '\n';
    return kDiagnosticFailure;
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assortment bandits with knapsacks under the MNL model"};
  app.require_subcommand(1);

  std::string config;
  std::string out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<int> reps;
  auto* run = app.add_subcommand("run", "simulate the configured policies");
  run->add_option("--config", config, "experiment JSON")->required();
  run->add_option("--out", out, "output directory");
  run->add_option("--seed", seed, "override the document seed");
  run->add_option("--replications", reps, "override the replication count");

  auto* opt = app.add_subcommand("opt", "solve the fluid benchmark LP");
  opt->add_option("--config", config, "experiment JSON")->required();

  std::optional<std::string> diag_out;
  auto* diag = app.add_subcommand("diagnose", "run the estimator diagnostics");
  diag->add_option("--config", config, "experiment JSON")->required();
  diag->add_option("--out", diag_out, "write diagnostics.json here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigFailure;
  }

  try {
    if (*run) return cmd_run(config, out, seed, reps);
    if (*opt) return cmd_opt(config);
    if (*diag) return cmd_diagnose(config, diag_out);
  } catch (const mnlkb::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
  return kConfigFailure;
}
