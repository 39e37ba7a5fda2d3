// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "sforge/chain.hpp"
#include "sforge/closed_forms.hpp"
#include "sforge/common.hpp"
#include "sforge/fock.hpp"
#include "sforge/io.hpp"
#include "sforge/optimizer.hpp"
#include "sforge/projection.hpp"

namespace sforge {

inline constexpr const char* kVersionTag = "slater-forge 0.1.0";

enum class ExperimentKind {
  kConvergenceTrace,
  kSlowTail,
  kGsSweep,
  kQuenchFidelity,
  kDensityCompare,
  kBoundReport,
  kOptimize,
};

inline const char* to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kConvergenceTrace: return "convergence_trace";
    case ExperimentKind::kSlowTail: return "slow_tail";
    case ExperimentKind::kGsSweep: return "gs_sweep";
    case ExperimentKind::kQuenchFidelity: return "quench_fidelity";
    case ExperimentKind::kDensityCompare: return "density_compare";
    case ExperimentKind::kBoundReport: return "bound_report";
    case ExperimentKind::kOptimize: return "optimize";
  }
  return "?";
}

inline std::optional<ExperimentKind> kind_from_string(const std::string& s) {
  using K = ExperimentKind;
  for (K k : {K::kConvergenceTrace, K::kSlowTail, K::kGsSweep, K::kQuenchFidelity,
              K::kDensityCompare, K::kBoundReport, K::kOptimize}) {
    if (s == to_string(k)) return k;
  }
  return std::nullopt;
}

/// Declarative description of one experiment run. Parsed from a flat
/// key = value config file; missing keys fall back to per-kind defaults
/// mirroring the reference setups.
struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::kGsSweep;
  int length = 0;                // L
  int n_particles = 0;           // N
  double interaction = 0.0;      // U
  bool interaction_set = false;  // distinguishes an explicit U = 0 from the default
  std::optional<int> confinement;  // L_i
  std::vector<int> m_list;
  std::vector<double> t_grid;
  std::vector<int> l_range;
  std::vector<double> u_list;
  std::vector<int> li_list;
  OptimizerConfig optimizer;
  std::string output_dir = "out";
  std::string input;  // wave-function dump, optimize kind only

  std::string canonical() const {
    std::ostringstream os;
    os << "kind=" << to_string(kind) << "\nL=" << length << "\nN=" << n_particles
       << "\nU=" << detail::fmt17(interaction) << "\nL_i="
       << (confinement ? std::to_string(*confinement) : std::string("-")) << "\n";
    auto join_i = [&os](const char* key, const std::vector<int>& v) {
      os << key << '=';
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
      os << "\n";
    };
    auto join_d = [&os](const char* key, const std::vector<double>& v) {
      os << key << '=';
      for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << detail::fmt17(v[i]);
      os << "\n";
    };
    join_i("M_list", m_list);
    join_d("t_grid", t_grid);
    join_i("L_range", l_range);
    join_d("U_list", u_list);
    join_i("Li_list", li_list);
    os << "restarts=" << optimizer.restarts << "\nmax_sweeps=" << optimizer.max_sweeps
       << "\nsweep_tolerance=" << detail::fmt17(optimizer.sweep_tolerance)
       << "\nseed=" << optimizer.seed << "\ninit="
       << (optimizer.init == OptimizerConfig::Init::kNatural ? "natural" : "random")
       << "\ninput=" << input << "\n";
    return os.str();
  }

  std::uint64_t spec_hash() const {
    const std::string text = canonical();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline long long parse_ll(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected integer, got '" + v + "'");
  }
  if (used != v.size()) {
    throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
  }
  return out;
}

inline double parse_d(const std::string& v, const std::string& key) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': expected number, got '" + v + "'");
  }
  if (used != v.size()) {
    throw ConfigError("config key '" + key + "': trailing characters in '" + v + "'");
  }
  return out;
}

/// Comma-separated values; each token may be a range first:last[:step].
inline std::vector<double> parse_list_d(const std::string& v, const std::string& key) {
  std::vector<double> out;
  std::istringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) throw ConfigError("config key '" + key + "': empty list entry");
    const auto c1 = tok.find(':');
    if (c1 == std::string::npos) {
      out.push_back(parse_d(tok, key));
      continue;
    }
    const auto c2 = tok.find(':', c1 + 1);
    const double first = parse_d(tok.substr(0, c1), key);
    const double last =
        parse_d(c2 == std::string::npos ? tok.substr(c1 + 1) : tok.substr(c1 + 1, c2 - c1 - 1), key);
    const double step = c2 == std::string::npos ? 1.0 : parse_d(tok.substr(c2 + 1), key);
    if (step <= 0.0 || last < first) {
      throw ConfigError("config key '" + key + "': bad range '" + tok + "'");
    }
    for (double x = first; x <= last + 1e-9 * step; x += step) out.push_back(x);
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

inline std::vector<int> parse_list_i(const std::string& v, const std::string& key) {
  std::vector<int> out;
  for (double x : parse_list_d(v, key)) {
    const int i = static_cast<int>(std::llround(x));
    if (std::abs(x - i) > 1e-9) {
      throw ConfigError("config key '" + key + "': expected integers");
    }
    out.push_back(i);
  }
  return out;
}

}  // namespace detail

/// Parses the flat key = value format ('#' starts a comment). Unknown or
/// duplicate keys are errors. `fallback_kind` supplies the kind when the
/// file omits it; a conflicting explicit kind is an error.
inline ExperimentSpec parse_config_text(const std::string& text,
                                        std::optional<ExperimentKind> fallback_kind = {}) {
  std::map<std::string, std::string> kv;
  std::istringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    }
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(lineno) + ": empty key or value");
    }
    if (kv.count(key)) {
      throw ConfigError("config: duplicate key '" + key + "'");
    }
    kv[key] = value;
  }

  ExperimentSpec spec;
  bool kind_set = false;
  if (auto it = kv.find("kind"); it != kv.end()) {
    const auto k = kind_from_string(it->second);
    if (!k) throw ConfigError("config: unknown kind '" + it->second + "'");
    spec.kind = *k;
    kind_set = true;
    kv.erase(it);
  }
  if (fallback_kind) {
    if (kind_set && spec.kind != *fallback_kind) {
      throw ConfigError("config kind conflicts with the requested subcommand");
    }
    spec.kind = *fallback_kind;
    kind_set = true;
  }
  if (!kind_set) throw ConfigError("config: missing 'kind'");

  auto take = [&kv](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };

  if (auto v = take("L")) spec.length = static_cast<int>(detail::parse_ll(*v, "L"));
  if (auto v = take("N")) spec.n_particles = static_cast<int>(detail::parse_ll(*v, "N"));
  if (auto v = take("U")) {
    spec.interaction = detail::parse_d(*v, "U");
    spec.interaction_set = true;
  }
  if (auto v = take("L_i")) spec.confinement = static_cast<int>(detail::parse_ll(*v, "L_i"));
  if (auto v = take("M")) spec.m_list = {static_cast<int>(detail::parse_ll(*v, "M"))};
  if (auto v = take("M_list")) spec.m_list = detail::parse_list_i(*v, "M_list");
  if (auto v = take("t_grid")) spec.t_grid = detail::parse_list_d(*v, "t_grid");
  if (auto v = take("L_range")) spec.l_range = detail::parse_list_i(*v, "L_range");
  if (auto v = take("U_list")) spec.u_list = detail::parse_list_d(*v, "U_list");
  if (auto v = take("Li_list")) spec.li_list = detail::parse_list_i(*v, "Li_list");
  if (auto v = take("restarts")) spec.optimizer.restarts = static_cast<int>(detail::parse_ll(*v, "restarts"));
  if (auto v = take("max_sweeps")) spec.optimizer.max_sweeps = static_cast<int>(detail::parse_ll(*v, "max_sweeps"));
  if (auto v = take("sweep_tolerance")) spec.optimizer.sweep_tolerance = detail::parse_d(*v, "sweep_tolerance");
  if (auto v = take("seed")) spec.optimizer.seed = static_cast<std::uint64_t>(detail::parse_ll(*v, "seed"));
  if (auto v = take("init")) {
    if (*v == "random") {
      spec.optimizer.init = OptimizerConfig::Init::kRandom;
    } else if (*v == "natural") {
      spec.optimizer.init = OptimizerConfig::Init::kNatural;
    } else {
      throw ConfigError("config key 'init': expected random or natural");
    }
  }
  if (auto v = take("output_dir")) spec.output_dir = *v;
  if (auto v = take("input")) spec.input = *v;

  if (!kv.empty()) {
    throw ConfigError("config: unknown key '" + kv.begin()->first + "'");
  }
  return spec;
}

inline ExperimentSpec parse_config_file(const std::filesystem::path& path,
                                        std::optional<ExperimentKind> fallback_kind = {}) {
  auto in = detail::open_input(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  ExperimentSpec spec = parse_config_text(ss.str(), fallback_kind);
  // a relative input is relative to the config file, not the caller
  if (!spec.input.empty() && std::filesystem::path(spec.input).is_relative()) {
    spec.input = (path.parent_path() / spec.input).string();
  }
  return spec;
}

namespace detail {

/// Fills per-kind defaults and checks the N <= M <= L style constraints.
inline void resolve_defaults(ExperimentSpec& spec) {
  using K = ExperimentKind;
  switch (spec.kind) {
    case K::kConvergenceTrace:
      if (spec.length == 0) spec.length = 20;
      if (spec.n_particles == 0) spec.n_particles = 4;
      if (!spec.interaction_set) spec.interaction = 1.0;
      if (!spec.confinement) spec.confinement = spec.n_particles;
      if (spec.m_list.empty()) spec.m_list = {spec.n_particles};
      if (spec.t_grid.empty()) spec.t_grid = {10.0, 40.0};
      break;
    case K::kSlowTail:
      if (spec.n_particles == 0) spec.n_particles = 3;
      if (!spec.interaction_set) spec.interaction = 1.0;
      if (spec.l_range.empty()) spec.l_range = {12};
      if (spec.li_list.empty()) spec.li_list = {5};
      if (spec.t_grid.empty()) spec.t_grid = {20.0};
      if (spec.l_range.size() != spec.li_list.size()) {
        throw ConfigError("slow_tail: L_range and Li_list must pair up");
      }
      break;
    case K::kGsSweep:
      if (spec.n_particles == 0) throw ConfigError("gs_sweep: N is required");
      if (spec.l_range.empty()) throw ConfigError("gs_sweep: L_range is required");
      if (spec.u_list.empty()) spec.u_list = {spec.interaction};
      break;
    case K::kQuenchFidelity:
    case K::kDensityCompare:
    case K::kBoundReport:
      if (spec.length == 0) spec.length = 25;
      if (spec.n_particles == 0) spec.n_particles = 3;
      if (!spec.interaction_set) spec.interaction = 1.0;
      if (spec.li_list.empty()) spec.li_list = {3, 5};
      if (spec.kind == K::kQuenchFidelity) {
        if (spec.m_list.empty()) spec.m_list = {3, 4, 5, 6, 7, 8};
        if (spec.t_grid.empty()) {
          for (int t = 0; t <= 100; ++t) spec.t_grid.push_back(t);
        }
      } else {
        if (spec.m_list.empty()) {
          spec.m_list = (spec.kind == K::kDensityCompare) ? std::vector<int>{3, 8}
                                                          : std::vector<int>{3, 4, 5, 6, 7, 8};
        }
        if (spec.t_grid.empty()) spec.t_grid = {20.0, 100.0};
        if (spec.t_grid.size() != spec.li_list.size()) {
          throw ConfigError("density_compare/bound_report: t_grid and Li_list must pair up");
        }
      }
      break;
    case K::kOptimize:
      if (spec.input.empty()) throw ConfigError("optimize: input is required");
      if (spec.m_list.empty()) throw ConfigError("optimize: M or M_list is required");
      break;
  }

  // every referenced combination must satisfy N <= M <= L and N <= L_i <= L
  const int n = spec.n_particles;
  auto check_l = [&](int l) {
    if (n < 1 || n > l) throw ConfigError("config: need 1 <= N <= L");
  };
  auto check_m = [&](int m, int l) {
    if (m < n || m > l) throw ConfigError("config: need N <= M <= L");
  };
  if (spec.kind == K::kOptimize) return;  // sizes come from the input dump
  if (spec.kind == K::kGsSweep) {
    for (int l : spec.l_range) check_l(l);
    return;
  }
  if (spec.kind == K::kSlowTail) {
    for (std::size_t i = 0; i < spec.l_range.size(); ++i) {
      check_l(spec.l_range[i]);
      if (spec.li_list[i] < n || spec.li_list[i] > spec.l_range[i]) {
        throw ConfigError("config: need N <= L_i <= L");
      }
    }
    return;
  }
  check_l(spec.length);
  for (int m : spec.m_list) check_m(m, spec.length);
  if (spec.confinement && (*spec.confinement < n || *spec.confinement > spec.length)) {
    throw ConfigError("config: need N <= L_i <= L");
  }
  for (int li : spec.li_list) {
    if (li < n || li > spec.length) throw ConfigError("config: need N <= L_i <= L");
  }
}

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace detail

/// Record of one run: what was produced, from which resolved spec.
struct RunManifest {
  std::string version = kVersionTag;
  ExperimentKind kind = ExperimentKind::kGsSweep;
  std::uint64_t spec_hash = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> outputs;
  double wall_time_s = 0.0;

  std::filesystem::path write(const std::filesystem::path& dir) const {
    nlohmann::ordered_json j;
    j["version"] = version;
    j["kind"] = to_string(kind);
    {
      std::ostringstream hex;
      hex << std::hex << spec_hash;
      j["spec_hash"] = hex.str();
    }
    j["seed"] = seed;
    j["outputs"] = outputs;
    j["wall_time_s"] = wall_time_s;
    const auto path = dir / "manifest.json";
    auto out = detail::open_output(path);
    out << j.dump(2) << "\n";
    return path;
  }
};

namespace detail {

inline std::ofstream open_csv(const std::filesystem::path& dir, const std::string& name,
                              RunManifest& manifest) {
  std::filesystem::create_directories(dir);
  manifest.outputs.push_back(name);
  return open_output(dir / name);
}

inline std::string format_time_label(double t) {
  std::ostringstream os;
  os << t;
  std::string s = os.str();
  for (char& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return s;
}

inline void write_trace_csv(std::ofstream& out, const std::vector<OptimizationTrace>& traces) {
  out << "restart,step,I\n";
  for (const auto& trace : traces) {
    for (std::size_t s = 0; s < trace.objective_steps.size(); ++s) {
      out << trace.restart_id << ',' << (s + 1) << ',' << fmt17(trace.objective_steps[s])
          << "\n";
    }
  }
}

/// All restarts with full traces (optimize() keeps only the best).
inline std::vector<OptimizationTrace> all_restart_traces(const WaveFunction& f,
                                                         const OptimizerConfig& config) {
  std::vector<OptimizationTrace> traces;
  traces.reserve(config.restarts);
  for (int r = 0; r < config.restarts; ++r) {
    OrbitalSet initial =
        (config.init == OptimizerConfig::Init::kNatural && r == 0)
            ? OrbitalSet(natural_orbitals(one_particle_rdm(f)).orbitals.leftCols(config.n_orbitals))
            : random_orbitals(f.basis().dim(), config.n_orbitals,
                              splitmix64(config.seed + static_cast<std::uint64_t>(r)));
    traces.push_back(optimize_from(f, std::move(initial), config, r));
  }
  return traces;
}

}  // namespace detail

/// Multi-restart convergence traces for the reference states: the ground
/// state plus confined-release states evolved to each configured time.
inline RunManifest run_convergence_trace(const ExperimentSpec& raw) {
  ExperimentSpec spec = raw;
  detail::resolve_defaults(spec);
  spec.optimizer.validate();
  const detail::Stopwatch clock;
  RunManifest manifest{kVersionTag, spec.kind, spec.spec_hash(), spec.optimizer.seed, {}, 0.0};
  const std::filesystem::path dir = spec.output_dir;

  const ChainSpec model{spec.length, spec.n_particles, spec.interaction, spec.confinement};
  OptimizerConfig config = spec.optimizer;
  config.n_orbitals = spec.m_list.front();

  std::vector<std::pair<std::string, WaveFunction>> states;
  states.emplace_back("gs", ground_state(ChainSpec{spec.length, spec.n_particles,
                                                   spec.interaction, std::nullopt}));
  if (!spec.t_grid.empty()) {
    const Propagator prop(model);
    const WaveFunction psi0 = confined_ground_state(model);
    const CVector coeffs = prop.mode_coefficients(psi0);
    for (double t : spec.t_grid) {
      states.emplace_back("t" + detail::format_time_label(t), prop.state_at(coeffs, t));
    }
  }

  auto summary = detail::open_csv(dir, "convergence_summary.csv", manifest);
  summary << "state,restart,final_I,converged\n";
  std::uint64_t salt = 0;
  for (const auto& [label, state] : states) {
    OptimizerConfig local = config;
    local.seed = detail::splitmix64(config.seed + (salt++));
    const auto traces = detail::all_restart_traces(state, local);
    auto out = detail::open_csv(dir, "convergence_" + label + ".csv", manifest);
    detail::write_trace_csv(out, traces);
    for (const auto& trace : traces) {
      summary << label << ',' << trace.restart_id << ',' << detail::fmt17(trace.final_objective())
              << ',' << (trace.converged ? 1 : 0) << "\n";
    }
  }
  manifest.wall_time_s = clock.seconds();
  manifest.write(dir);
  return manifest;
}

/// Late-stage convergence for the interaction-quenched release: U is set to
/// zero at t = 0, the orbital budget matches the confinement width, and the
/// exact best overlap is 1. Also reports the overlap achieved by the
/// analytically propagated confined modes.
inline RunManifest run_slow_tail(const ExperimentSpec& raw) {
  ExperimentSpec spec = raw;
  detail::resolve_defaults(spec);
  spec.optimizer.validate();
  const detail::Stopwatch clock;
  RunManifest manifest{kVersionTag, spec.kind, spec.spec_hash(), spec.optimizer.seed, {}, 0.0};
  const std::filesystem::path dir = spec.output_dir;

  auto summary = detail::open_csv(dir, "slow_tail_summary.csv", manifest);
  summary << "L,Li,t,I_free_modes,I_best,I_spread\n";
  std::uint64_t salt = 0;
  for (std::size_t pair = 0; pair < spec.l_range.size(); ++pair) {
    const int l = spec.l_range[pair];
    const int li = spec.li_list[pair];
    const ChainSpec pre{l, spec.n_particles, spec.interaction, li};
    const ChainSpec post{l, spec.n_particles, 0.0, std::nullopt};
    const WaveFunction psi0 = confined_ground_state(pre);
    const Propagator prop(post);
    const CVector coeffs = prop.mode_coefficients(psi0);
    for (double t : spec.t_grid) {
      const WaveFunction psi = prop.state_at(coeffs, t);
      OptimizerConfig config = spec.optimizer;
      config.n_orbitals = li;
      config.seed = detail::splitmix64(spec.optimizer.seed + (salt++));
      const auto traces = detail::all_restart_traces(psi, config);
      auto out = detail::open_csv(
          dir, "slow_tail_L" + std::to_string(l) + "_Li" + std::to_string(li) + "_t" +
                   detail::format_time_label(t) + ".csv",
          manifest);
      detail::write_trace_csv(out, traces);
      double best = 0.0, worst = 1.0;
      for (const auto& trace : traces) {
        best = std::max(best, trace.final_objective());
        worst = std::min(worst, trace.final_objective());
      }
      const double free_overlap =
          objective(psi, OrbitalSet(propagated_confined_modes(l, li, t)));
      summary << l << ',' << li << ',' << detail::fmt17(t) << ',' << detail::fmt17(free_overlap)
              << ',' << detail::fmt17(best) << ',' << detail::fmt17(best - worst) << "\n";
    }
  }
  manifest.wall_time_s = clock.seconds();
  manifest.write(dir);
  return manifest;
}

/// Ground-state best overlap at M = N across lattice sizes and interaction
/// strengths, with the occupation-sum bound alongside.
inline RunManifest run_gs_sweep(const ExperimentSpec& raw) {
  ExperimentSpec spec = raw;
  detail::resolve_defaults(spec);
  spec.optimizer.validate();
  const detail::Stopwatch clock;
  RunManifest manifest{kVersionTag, spec.kind, spec.spec_hash(), spec.optimizer.seed, {}, 0.0};
  const std::filesystem::path dir = spec.output_dir;

  auto out = detail::open_csv(dir, "gs_sweep.csv", manifest);
  out << "L,U,I_max,I_upper\n";
  std::uint64_t salt = 0;
  for (double u : spec.u_list) {
    for (int l : spec.l_range) {
      const ChainSpec model{l, spec.n_particles, u, std::nullopt};
      const WaveFunction gs = ground_state(model);
      OptimizerConfig config = spec.optimizer;
      config.n_orbitals = spec.n_particles;
      config.seed = detail::splitmix64(spec.optimizer.seed + (salt++));
      const MultiStartResult res = optimize(gs, config);
      const double bound = upper_bound(gs, spec.n_particles);
      out << l << ',' << detail::fmt17(u) << ',' << detail::fmt17(res.best.final_objective())
          << ',' << detail::fmt17(bound) << "\n";
    }
  }
  manifest.wall_time_s = clock.seconds();
  manifest.write(dir);
  return manifest;
}

/// Best overlap versus time after lifting the confinement, for each orbital
/// budget, plus the interaction energy of the exact state. Also writes the
/// per-time observable record (total energy, interaction energy, densities).
inline RunManifest run_quench_fidelity(const ExperimentSpec& raw) {
  ExperimentSpec spec = raw;
  detail::resolve_defaults(spec);
  spec.optimizer.validate();
  const detail::Stopwatch clock;
  RunManifest manifest{kVersionTag, spec.kind, spec.spec_hash(), spec.optimizer.seed, {}, 0.0};
  const std::filesystem::path dir = spec.output_dir;

  const ChainSpec post{spec.length, spec.n_particles, spec.interaction, std::nullopt};
  const Propagator prop(post);
  std::uint64_t salt = 0;
  for (int li : spec.li_list) {
    const ChainSpec pre{spec.length, spec.n_particles, spec.interaction, li};
    const WaveFunction psi0 = confined_ground_state(pre);
    const CVector coeffs = prop.mode_coefficients(psi0);
    const double e_total = prop.energy(coeffs);

    auto fid = detail::open_csv(dir, "quench_fidelity_Li" + std::to_string(li) + ".csv",
                                manifest);
    fid << "t,M,I_max,E_int\n";
    auto obs = detail::open_csv(dir, "observables_Li" + std::to_string(li) + ".csv", manifest);
    obs << "t,E_total,E_int";
    for (int s = 0; s < spec.length; ++s) obs << ",n_" << s;
    obs << "\n";

    for (double t : spec.t_grid) {
      const WaveFunction psi = prop.state_at(coeffs, t);
      const double e_int = interaction_energy(psi, spec.interaction);
      const RVector n = density(psi);
      obs << detail::fmt17(t) << ',' << detail::fmt17(e_total) << ',' << detail::fmt17(e_int);
      for (int s = 0; s < spec.length; ++s) obs << ',' << detail::fmt17(n(s));
      obs << "\n";
      for (int m : spec.m_list) {
        OptimizerConfig config = spec.optimizer;
        config.n_orbitals = m;
        config.seed = detail::splitmix64(spec.optimizer.seed + (salt++));
        const MultiStartResult res = optimize(psi, config);
        fid << detail::fmt17(t) << ',' << m << ',' << detail::fmt17(res.best.final_objective())
            << ',' << detail::fmt17(e_int) << "\n";
      }
    }
  }
  manifest.wall_time_s = clock.seconds();
  manifest.write(dir);
  return manifest;
}

/// Exact versus reconstructed densities at the configured checkpoints, with
/// the inner-product/density-distance bound summary.
inline RunManifest run_density_compare(const ExperimentSpec& raw) {
  ExperimentSpec spec = raw;
  detail::resolve_defaults(spec);
  spec.optimizer.validate();
  const detail::Stopwatch clock;
  RunManifest manifest{kVersionTag, spec.kind, spec.spec_hash(), spec.optimizer.seed, {}, 0.0};
  const std::filesystem::path dir = spec.output_dir;

  const ChainSpec post{spec.length, spec.n_particles, spec.interaction, std::nullopt};
  const Propagator prop(post);
  auto summary = detail::open_csv(dir, "density_compare_summary.csv", manifest);
  summary << "case,M,I_max,eps,delta1,sqrt8eps,bound_ok\n";
  std::uint64_t salt = 0;
  for (std::size_t c = 0; c < spec.li_list.size(); ++c) {
    const int li = spec.li_list[c];
    const double t = spec.t_grid[c];
    const std::string label = "Li" + std::to_string(li) + "_t" + detail::format_time_label(t);
    const ChainSpec pre{spec.length, spec.n_particles, spec.interaction, li};
    const WaveFunction psi0 = confined_ground_state(pre);
    const WaveFunction psi = prop.evolve(psi0, t);
    const RVector n_exact = density(psi);

    std::vector<RVector> densities;
    for (int m : spec.m_list) {
      OptimizerConfig config = spec.optimizer;
      config.n_orbitals = m;
      config.seed = detail::splitmix64(spec.optimizer.seed + (salt++));
      const MultiStartResult res = optimize(psi, config);
      const WaveFunction w =
          reconstruct_approximant(res.best.amplitudes, res.best.orbitals, psi.basis_ptr());
      densities.push_back(density(w));
      const DensityBoundReport rep = density_distance_bound_check(psi, w);
      summary << label << ',' << m << ',' << detail::fmt17(res.best.final_objective()) << ','
              << detail::fmt17(rep.epsilon) << ',' << detail::fmt17(rep.delta1) << ','
              << detail::fmt17(std::sqrt(8.0 * rep.epsilon)) << ',' << (rep.bound_ok ? 1 : 0)
              << "\n";
    }

    auto out = detail::open_csv(dir, "density_compare_" + label + ".csv", manifest);
    out << "site,n_exact";
    for (int m : spec.m_list) out << ",n_M" << m;
    out << "\n";
    for (int s = 0; s < spec.length; ++s) {
      out << s << ',' << detail::fmt17(n_exact(s));
      for (const auto& n : densities) out << ',' << detail::fmt17(n(s));
      out << "\n";
    }
  }
  manifest.wall_time_s = clock.seconds();
  manifest.write(dir);
  return manifest;
}

/// Optimized overlap next to its occupation-sum bound for the ground state
/// and each configured checkpoint state.
inline RunManifest run_bound_report(const ExperimentSpec& raw) {
  ExperimentSpec spec = raw;
  detail::resolve_defaults(spec);
  spec.optimizer.validate();
  const detail::Stopwatch clock;
  RunManifest manifest{kVersionTag, spec.kind, spec.spec_hash(), spec.optimizer.seed, {}, 0.0};
  const std::filesystem::path dir = spec.output_dir;

  std::vector<std::pair<std::string, WaveFunction>> states;
  const ChainSpec model{spec.length, spec.n_particles, spec.interaction, std::nullopt};
  states.emplace_back("gs", ground_state(model));
  const Propagator prop(model);
  for (std::size_t c = 0; c < spec.li_list.size(); ++c) {
    const int li = spec.li_list[c];
    const double t = spec.t_grid[c];
    const ChainSpec pre{spec.length, spec.n_particles, spec.interaction, li};
    states.emplace_back("Li" + std::to_string(li) + "_t" + detail::format_time_label(t),
                        prop.evolve(confined_ground_state(pre), t));
  }

  auto out = detail::open_csv(dir, "bound_report.csv", manifest);
  out << "state,M,I_opt,I_upper\n";
  std::uint64_t salt = 0;
  for (const auto& [label, state] : states) {
    const ReducedDensityMatrix rdm = one_particle_rdm(state);
    for (int m : spec.m_list) {
      OptimizerConfig config = spec.optimizer;
      config.n_orbitals = m;
      config.seed = detail::splitmix64(spec.optimizer.seed + (salt++));
      const MultiStartResult res = optimize(state, config);
      out << label << ',' << m << ',' << detail::fmt17(res.best.final_objective()) << ','
          << detail::fmt17(upper_bound(rdm, m)) << "\n";
    }
  }
  manifest.wall_time_s = clock.seconds();
  manifest.write(dir);
  return manifest;
}

/// Ad-hoc optimization of a dumped wave function: writes the orbital set,
/// the configuration overlaps, the per-step trace, and a result record per
/// orbital budget.
inline RunManifest run_optimize_file(const ExperimentSpec& raw) {
  ExperimentSpec spec = raw;
  detail::resolve_defaults(spec);
  spec.optimizer.validate();
  const detail::Stopwatch clock;
  RunManifest manifest{kVersionTag, spec.kind, spec.spec_hash(), spec.optimizer.seed, {}, 0.0};
  const std::filesystem::path dir = spec.output_dir;
  std::filesystem::create_directories(dir);

  const WaveFunction f = read_wavefunction(spec.input).normalized();
  write_complex_matrix(dir / "rdm.csv", one_particle_rdm(f).matrix);
  manifest.outputs.push_back("rdm.csv");
  std::uint64_t salt = 0;
  for (int m : spec.m_list) {
    OptimizerConfig config = spec.optimizer;
    config.n_orbitals = m;
    config.seed = detail::splitmix64(spec.optimizer.seed + (salt++));
    const auto traces = detail::all_restart_traces(f, config);
    const OptimizationTrace* best = &traces.front();
    for (const auto& trace : traces) {
      if (trace.final_objective() > best->final_objective()) best = &trace;
    }

    const std::string tag = "M" + std::to_string(m);
    const std::string orb_name = "orbitals_" + tag + ".orb";
    write_orbitals(dir / orb_name, best->orbitals);
    manifest.outputs.push_back(orb_name);
    const std::string eta_name = "eta_" + tag + ".csv";
    write_config_amplitudes(dir / eta_name, best->amplitudes);
    manifest.outputs.push_back(eta_name);
    auto trace_out = detail::open_csv(dir, "trace_" + tag + ".csv", manifest);
    detail::write_trace_csv(trace_out, traces);

    nlohmann::ordered_json j;
    j["final_I"] = best->final_objective();
    j["sweeps_used"] = best->sweeps_used;
    j["converged"] = best->converged;
    j["stagnated"] = best->stagnated;
    j["restart_finals"] = nlohmann::json::array();
    for (const auto& trace : traces) j["restart_finals"].push_back(trace.final_objective());
    j["orbitals_file"] = orb_name;
    const std::string res_name = "result_" + tag + ".json";
    auto res_out = detail::open_output(dir / res_name);
    res_out << j.dump(2) << "\n";
    manifest.outputs.push_back(res_name);
  }
  manifest.wall_time_s = clock.seconds();
  manifest.write(dir);
  return manifest;
}

inline RunManifest run_experiment(const ExperimentSpec& spec) {
  switch (spec.kind) {
    case ExperimentKind::kConvergenceTrace: return run_convergence_trace(spec);
    case ExperimentKind::kSlowTail: return run_slow_tail(spec);
    case ExperimentKind::kGsSweep: return run_gs_sweep(spec);
    case ExperimentKind::kQuenchFidelity: return run_quench_fidelity(spec);
    case ExperimentKind::kDensityCompare: return run_density_compare(spec);
    case ExperimentKind::kBoundReport: return run_bound_report(spec);
    case ExperimentKind::kOptimize: return run_optimize_file(spec);
  }
  throw ConfigError("run_experiment: unknown kind");
}

}  // namespace sforge
