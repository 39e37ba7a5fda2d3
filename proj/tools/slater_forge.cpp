// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

// Experiment driver: each subcommand reads a flat key = value config file,
// runs one study, and writes plot-ready CSV plus a manifest.json into the
// output directory. Exit codes: 0 success, 2 config error, 3 numerical
// failure.

#include <cstdint>
#include <iostream>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include "sforge/experiments.hpp"

namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  long long seed = -1;
  int restarts = -1;
};

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config, "config file (key = value lines)")->required();
  sub->add_option("--out", opts.out, "output directory (overrides output_dir)");
  sub->add_option("--seed", opts.seed, "base seed (overrides seed)");
  sub->add_option("--restarts", opts.restarts, "restart count (overrides restarts)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"slater-forge: optimal multi-configuration approximation of fermion states"};
  app.require_subcommand(1);

  const std::vector<std::pair<sforge::ExperimentKind, const char*>> kinds = {
      {sforge::ExperimentKind::kConvergenceTrace,
       "multi-restart convergence traces for reference states"},
      {sforge::ExperimentKind::kSlowTail,
       "late-stage convergence after an interaction quench to zero"},
      {sforge::ExperimentKind::kGsSweep, "ground-state best overlap across lattice sizes"},
      {sforge::ExperimentKind::kQuenchFidelity,
       "best overlap versus time after a confinement release"},
      {sforge::ExperimentKind::kDensityCompare,
       "exact versus approximant density distributions"},
      {sforge::ExperimentKind::kBoundReport,
       "optimized overlap against the occupation-sum bound"},
      {sforge::ExperimentKind::kOptimize, "optimize orbitals for a dumped wave function"},
  };

  CommonOptions opts;
  sforge::ExperimentKind selected = sforge::ExperimentKind::kGsSweep;
  for (const auto& [kind, help] : kinds) {
    CLI::App* sub = app.add_subcommand(sforge::to_string(kind), help);
    add_common(sub, opts);
    sub->callback([kind, &selected] { selected = kind; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    sforge::ExperimentSpec spec = sforge::parse_config_file(opts.config, selected);
    if (!opts.out.empty()) spec.output_dir = opts.out;
    if (opts.seed >= 0) spec.optimizer.seed = static_cast<std::uint64_t>(opts.seed);
    if (opts.restarts > 0) spec.optimizer.restarts = opts.restarts;
    const sforge::RunManifest manifest = sforge::run_experiment(spec);
    std::cout << sforge::to_string(manifest.kind) << ": wrote " << manifest.outputs.size()
              << " file(s) plus manifest.json to " << spec.output_dir << " in "
              << manifest.wall_time_s << " s\n";
    return 0;
  } catch (const sforge::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
