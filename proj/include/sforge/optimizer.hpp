// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "sforge/closed_forms.hpp"
#include "sforge/common.hpp"
#include "sforge/fock.hpp"
#include "sforge/linalg.hpp"
#include "sforge/projection.hpp"

namespace sforge {

/// Alternating single-orbital optimization. One step optimizes the leading
/// orbital against the fixed remainder: the contraction vectors of every
/// configuration containing the leading slot are projected out of the span
/// of the partners and accumulated into a positive semidefinite operator
/// whose top eigenvector is the new leading orbital. A sweep rotates each
/// orbital through the leading slot once. The objective never decreases.

struct OptimizerConfig {
  enum class Init { kRandom, kNatural };

  int n_orbitals = 0;
  int max_sweeps = 500;
  double sweep_tolerance = 1e-12;
  int restarts = 6;
  std::uint64_t seed = 1;
  Init init = Init::kRandom;

  void validate() const {
    if (restarts < 1) throw ConfigError("OptimizerConfig: restarts must be >= 1");
    if (sweep_tolerance <= 0.0) throw ConfigError("OptimizerConfig: tolerance must be > 0");
    if (max_sweeps < 1) throw ConfigError("OptimizerConfig: max_sweeps must be >= 1");
  }
};

/// Orthonormal columns from a seeded complex Gaussian matrix.
inline OrbitalSet random_orbitals(int dim, int n_orbitals, std::uint64_t seed) {
  if (n_orbitals > dim) throw DimensionError("random_orbitals: M > d");
  CMatrix v = detail::gaussian_matrix(dim, n_orbitals, seed);
  detail::orthonormalize_columns(v);
  return OrbitalSet(std::move(v));
}

struct SlotUpdate {
  OrbitalSet orbitals;
  double objective = 0.0;
  bool stagnated = false;
};

/// Optimizes column 0 of the orbital set against columns 1..M-1. Returns the
/// updated set together with the exact objective of the new set. When every
/// contraction vector vanishes (the state is unreachable from the current
/// partners) the leading orbital is kept and the update is flagged.
inline SlotUpdate optimize_leading_orbital(const WaveFunction& f, const OrbitalSet& orbitals) {
  detail::require_compatible(f, orbitals);
  const FockBasis& basis = f.basis();
  const int n = basis.particles();
  const int m = orbitals.count();
  const int d = orbitals.dim();
  const CMatrix& v = orbitals.matrix();
  const auto partners = v.rightCols(m - 1);

  // Contraction vectors for configurations containing the leading slot, and
  // overlaps of configurations avoiding it. Combination indices refer to
  // partner columns; a full-set configuration is the leading column plus the
  // shifted partner combination, which is already in ascending column order,
  // so the leading column expands along the first determinant column.
  const std::size_t n_lead = binomial(m - 1, n - 1);
  const std::size_t n_rest = binomial(m - 1, n);
  CMatrix g = CMatrix::Zero(d, static_cast<Eigen::Index>(n_lead));
  CVector eta_rest = CVector::Zero(static_cast<Eigen::Index>(n_rest));

  if (n == 1) {
    g.col(0) = f.amplitudes();
    for (int j = 0; j + 1 < m; ++j) {
      eta_rest(j) = f.amplitudes().dot(partners.col(j));
    }
  } else {
    const FockBasis lead_combos(m - 1, n - 1);
    CMatrix rows(n, m - 1), minor(n - 1, n - 1), sub(n, n);
    detail::Determinant det;
    const bool have_rest = (m - 1 >= n);
    const FockBasis rest_combos = have_rest ? FockBasis(m - 1, n) : FockBasis(1, 1);
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const Complex c = f.amplitudes()(static_cast<Eigen::Index>(k));
      if (c == Complex(0.0, 0.0)) continue;
      const auto x = basis.state(k);
      detail::gather_rows(partners, x.data(), n, rows);
      for (std::size_t q = 0; q < lead_combos.size(); ++q) {
        const auto cols = lead_combos.state(q);
        for (int mm = 0; mm < n; ++mm) {
          int r = 0;
          for (int i = 0; i < n; ++i) {
            if (i == mm) continue;
            for (int cidx = 0; cidx < n - 1; ++cidx) minor(r, cidx) = rows(i, cols[cidx]);
            ++r;
          }
          const Complex dm = det(minor);
          const double sign = (mm % 2 == 0) ? 1.0 : -1.0;
          g(x[mm], static_cast<Eigen::Index>(q)) += c * sign * std::conj(dm);
        }
      }
      if (have_rest) {
        const Complex cc = std::conj(c);
        for (std::size_t q = 0; q < rest_combos.size(); ++q) {
          const auto cols = rest_combos.state(q);
          for (int qq = 0; qq < n; ++qq) sub.col(qq) = rows.col(cols[qq]);
          eta_rest(static_cast<Eigen::Index>(q)) += cc * det(sub);
        }
      }
    }
  }

  const double rest_weight = eta_rest.squaredNorm();

  // Project the partner span out of every contraction vector.
  if (m > 1) g -= partners * (partners.adjoint() * g);

  CVector lead = v.col(0);
  bool stagnated = false;
  if (n_lead == 1) {
    const double nrm = g.col(0).norm();
    if (nrm < 1e-14) {
      stagnated = true;
    } else {
      lead = g.col(0) / nrm;
    }
  } else {
    const CMatrix t_op = g * g.adjoint();
    Eigen::SelfAdjointEigenSolver<CMatrix> solver(t_op);
    if (solver.info() != Eigen::Success) {
      throw NumericalError("optimize_leading_orbital: eigensolver failed");
    }
    const RVector& ev = solver.eigenvalues();
    const double top = ev(ev.size() - 1);
    if (top < 1e-28) {
      stagnated = true;
    } else {
      // Near-degenerate top eigenvalues: keep continuity with the current
      // leading orbital. The window is well inside the monotonicity budget.
      Eigen::Index pick = ev.size() - 1;
      double best_overlap = -1.0;
      for (Eigen::Index i = ev.size() - 1; i >= 0 && ev(i) >= top - 1e-14; --i) {
        const double ov = std::abs(solver.eigenvectors().col(i).dot(v.col(0)));
        if (ov > best_overlap) {
          best_overlap = ov;
          pick = i;
        }
      }
      lead = solver.eigenvectors().col(pick);
      if (m > 1) lead -= partners * (partners.adjoint() * lead);
      lead /= lead.norm();
    }
  }
  detail::fix_phase(lead);

  const double lead_weight = (g.adjoint() * lead).squaredNorm();
  CMatrix updated = v;
  updated.col(0) = lead;
  return SlotUpdate{OrbitalSet(std::move(updated)), rest_weight + lead_weight, stagnated};
}

struct SweepOutcome {
  OrbitalSet orbitals;
  std::vector<double> objective_steps;  // one entry per orbital update
  bool stagnated = false;
};

/// One full sweep: M times (optimize the leading orbital, then shift every
/// column one place to the right so the next orbital takes the lead). After
/// M shifts the columns are back in their original slots.
inline SweepOutcome sweep(const WaveFunction& f, const OrbitalSet& orbitals) {
  const int m = orbitals.count();
  SweepOutcome out{orbitals, {}, false};
  out.objective_steps.reserve(m);
  for (int s = 0; s < m; ++s) {
    SlotUpdate up = optimize_leading_orbital(f, out.orbitals);
    out.stagnated = out.stagnated || up.stagnated;
    out.objective_steps.push_back(up.objective);
    const CMatrix& cur = up.orbitals.matrix();
    CMatrix shifted(cur.rows(), m);
    shifted.col(0) = cur.col(m - 1);
    shifted.rightCols(m - 1) = cur.leftCols(m - 1);
    out.orbitals = OrbitalSet(std::move(shifted));
  }
  // Repair accumulated drift if any; each update already re-projects.
  const CMatrix& w = out.orbitals.matrix();
  CMatrix gram = w.adjoint() * w;
  gram.diagonal().array() -= 1.0;
  if (gram.cwiseAbs().maxCoeff() > 1e-10) {
    CMatrix repaired = w;
    detail::orthonormalize_columns(repaired);
    out.orbitals = OrbitalSet(std::move(repaired));
  }
  return out;
}

struct OptimizationTrace {
  std::vector<double> objective_steps;
  OrbitalSet orbitals;
  ConfigAmplitudes amplitudes;
  bool converged = false;
  bool stagnated = false;
  int restart_id = 0;
  int sweeps_used = 0;

  double final_objective() const {
    return objective_steps.empty() ? 0.0 : objective_steps.back();
  }
};

/// Sweeps from the given initial orbitals until the objective gain of a full
/// sweep drops below the tolerance or the sweep budget runs out.
inline OptimizationTrace optimize_from(const WaveFunction& f, OrbitalSet initial,
                                       const OptimizerConfig& config, int restart_id) {
  OptimizationTrace trace{{}, std::move(initial), ConfigAmplitudes{}, false, false, restart_id, 0};
  double prev = objective(f, trace.orbitals);
  for (int s = 0; s < config.max_sweeps; ++s) {
    SweepOutcome out = sweep(f, trace.orbitals);
    trace.orbitals = std::move(out.orbitals);
    trace.stagnated = trace.stagnated || out.stagnated;
    trace.objective_steps.insert(trace.objective_steps.end(), out.objective_steps.begin(),
                                 out.objective_steps.end());
    ++trace.sweeps_used;
    const double cur = trace.objective_steps.back();
    if (cur - prev < config.sweep_tolerance) {
      trace.converged = true;
      break;
    }
    prev = cur;
  }
  trace.amplitudes = eta_all(f, trace.orbitals);
  return trace;
}

struct MultiStartResult {
  OptimizationTrace best;
  std::vector<double> restart_finals;

  double spread() const {
    const auto [lo, hi] = std::minmax_element(restart_finals.begin(), restart_finals.end());
    return *hi - *lo;
  }
};

/// Independent seeded restarts; the trace with the largest final objective
/// wins. The per-restart finals expose local-maximum trapping. With natural
/// initialization the first restart starts from the most occupied natural
/// orbitals instead of a random subspace.
inline MultiStartResult optimize(const WaveFunction& f, const OptimizerConfig& config) {
  config.validate();
  const int d = f.basis().dim();
  const int m = config.n_orbitals;
  if (m > d) throw DimensionError("optimize: M > d");
  if (f.basis().particles() > m) throw DimensionError("optimize: M < N");

  MultiStartResult result{OptimizationTrace{{}, OrbitalSet(CMatrix::Identity(d, m)),
                                            ConfigAmplitudes{}, false, false, 0, 0},
                          {}};
  result.restart_finals.reserve(config.restarts);
  bool have_best = false;
  for (int r = 0; r < config.restarts; ++r) {
    OrbitalSet initial =
        (config.init == OptimizerConfig::Init::kNatural && r == 0)
            ? OrbitalSet(natural_orbitals(one_particle_rdm(f)).orbitals.leftCols(m))
            : random_orbitals(d, m, detail::splitmix64(config.seed + static_cast<std::uint64_t>(r)));
    OptimizationTrace trace = optimize_from(f, std::move(initial), config, r);
    result.restart_finals.push_back(trace.final_objective());
    if (!have_best || trace.final_objective() > result.best.final_objective()) {
      result.best = std::move(trace);
      have_best = true;
    }
  }
  return result;
}

}  // namespace sforge
