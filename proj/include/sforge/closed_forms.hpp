// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "sforge/chain.hpp"
#include "sforge/common.hpp"
#include "sforge/fock.hpp"
#include "sforge/linalg.hpp"
#include "sforge/projection.hpp"

namespace sforge {

/// One-particle reduced density matrix, Hermitian PSD with trace N.
struct ReducedDensityMatrix {
  CMatrix matrix;
  int n_particles = 0;
};

/// rho(x, y) = <f| c_y^dagger c_x |f> accumulated over single-particle moves
/// with the site-ascending sign convention; symmetrized against roundoff.
inline ReducedDensityMatrix one_particle_rdm(const WaveFunction& f) {
  const FockBasis& basis = f.basis();
  const int d = basis.dim();
  const int n = basis.particles();
  CMatrix rho = CMatrix::Zero(d, d);

  std::vector<char> occ(d);
  std::vector<int> moved(n);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const Complex c = f.amplitudes()(static_cast<Eigen::Index>(k));
    if (c == Complex(0.0, 0.0)) continue;
    const auto x = basis.state(k);
    std::fill(occ.begin(), occ.end(), 0);
    for (int s : x) occ[s] = 1;
    const double w = std::norm(c);
    for (int i = 0; i < n; ++i) rho(x[i], x[i]) += w;
    for (int i = 0; i < n; ++i) {
      for (int y = 0; y < d; ++y) {
        if (occ[y]) continue;
        // remove x[i], insert y, track the parity of both reorderings
        int pos_y = 0;
        int r = 0;
        for (int j = 0; j < n; ++j) {
          if (j == i) continue;
          if (x[j] < y) ++pos_y;
          moved[r++] = x[j];
        }
        moved[n - 1] = y;
        for (int j = n - 1; j > 0 && moved[j] < moved[j - 1]; --j) {
          std::swap(moved[j], moved[j - 1]);
        }
        const double sign = ((i + pos_y) % 2 == 0) ? 1.0 : -1.0;
        const std::size_t kk = basis.rank({moved.data(), moved.size()});
        rho(x[i], y) += sign * c * std::conj(f.amplitudes()(static_cast<Eigen::Index>(kk)));
      }
    }
  }
  rho = ((rho + rho.adjoint()) / 2.0).eval();
  return ReducedDensityMatrix{std::move(rho), n};
}

/// Natural orbitals with occupations sorted descending.
struct NaturalOrbitals {
  RVector occupations;
  CMatrix orbitals;  // columns, phase-fixed
};

inline NaturalOrbitals natural_orbitals(const ReducedDensityMatrix& rdm) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(rdm.matrix);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("natural_orbitals: eigensolver failed");
  }
  const Eigen::Index d = rdm.matrix.rows();
  NaturalOrbitals result{RVector(d), CMatrix(d, d)};
  for (Eigen::Index i = 0; i < d; ++i) {
    result.occupations(i) = solver.eigenvalues()(d - 1 - i);
    result.orbitals.col(i) = solver.eigenvectors().col(d - 1 - i);
    detail::fix_phase(result.orbitals.col(i));
  }
  return result;
}

/// Occupation-sum bound on the best M-orbital projection weight:
/// (sum of the M largest occupations) / N, clipped to [0, 1]. Tight for
/// N = 2; one-sided for N >= 3.
inline double upper_bound(const ReducedDensityMatrix& rdm, int n_orbitals) {
  if (n_orbitals < 1 || n_orbitals > rdm.matrix.rows()) {
    throw DimensionError("upper_bound: need 1 <= M <= d");
  }
  const NaturalOrbitals no = natural_orbitals(rdm);
  const double s = no.occupations.head(n_orbitals).sum() / rdm.n_particles;
  return std::clamp(s, 0.0, 1.0);
}

inline double upper_bound(const WaveFunction& f, int n_orbitals) {
  return upper_bound(one_particle_rdm(f), n_orbitals);
}

/// Exact two-fermion optimum: the best M orbitals are the M most occupied
/// natural orbitals and the weight is the sum of the top M/2 occupation
/// pairs. Odd M is rejected: the canonical pair structure makes the extra
/// orbital useless.
struct TwoFermionOptimum {
  double value = 0.0;
  double cutoff_gap = 0.0;  // occupation gap across the M-orbital cutoff
  CMatrix orbitals;         // the 2*(M/2) natural orbitals achieving the value
};

inline TwoFermionOptimum imax_two_fermion(const WaveFunction& f, int n_orbitals) {
  if (f.basis().particles() != 2) {
    throw DimensionError("imax_two_fermion: requires a two-fermion state");
  }
  if (n_orbitals % 2 != 0) {
    throw DimensionError(
        "imax_two_fermion: odd M is wasteful, the canonical form pairs the orbitals; use M-1");
  }
  const int d = f.basis().dim();
  if (n_orbitals < 2 || n_orbitals > d) {
    throw DimensionError("imax_two_fermion: need 2 <= M <= d");
  }
  const NaturalOrbitals no = natural_orbitals(one_particle_rdm(f));
  TwoFermionOptimum out;
  out.value = std::clamp(no.occupations.head(n_orbitals).sum() / 2.0, 0.0, 1.0);
  out.cutoff_gap = (n_orbitals < d)
                       ? no.occupations(n_orbitals - 1) - no.occupations(n_orbitals)
                       : no.occupations(n_orbitals - 1);
  out.orbitals = no.orbitals.leftCols(n_orbitals);
  return out;
}

/// Two-boson analogue on a raw symmetric amplitude matrix: the canonical
/// occupations are the eigenvalues of b b^dagger and the best M-orbital
/// weight is the sum of the M largest.
inline double imax_two_boson(const CMatrix& b, int n_orbitals) {
  const Eigen::Index d = b.rows();
  if (b.cols() != d) throw DimensionError("imax_two_boson: matrix must be square");
  if ((b - b.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw DimensionError("imax_two_boson: amplitude matrix must be symmetric");
  }
  if (std::abs(b.norm() - 1.0) > 1e-8) {
    throw DimensionError("imax_two_boson: amplitude matrix must be normalized");
  }
  if (n_orbitals < 1 || n_orbitals > d) {
    throw DimensionError("imax_two_boson: need 1 <= M <= d");
  }
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(b * b.adjoint());
  if (solver.info() != Eigen::Success) {
    throw NumericalError("imax_two_boson: eigensolver failed");
  }
  double s = 0.0;
  for (int i = 0; i < n_orbitals; ++i) s += solver.eigenvalues()(d - 1 - i);
  return std::clamp(s, 0.0, 1.0);
}

/// An N-fermion state with only N+1 orbitals available is a single Slater
/// determinant; the unoccupied direction is the hole orbital, read off from
/// the expansion coefficients with alternating signs.
struct HoleDecomposition {
  CVector hole_orbital;
  CMatrix complement_orbitals;   // d x N, orthonormal, orthogonal to the hole
  double reconstruction_error;   // distance of f to the complement determinant
  double contraction_residual;   // max |sum_z f(..., z) conj(hole(z))|
};

inline HoleDecomposition hole_decomposition(const WaveFunction& f) {
  const FockBasis& basis = f.basis();
  const int n = basis.particles();
  const int d = basis.dim();
  if (d != n + 1) {
    throw DimensionError("hole_decomposition: requires d = N + 1");
  }
  if (f.norm() < 1e-12) {
    throw NumericalError("hole_decomposition: zero state");
  }

  // Expansion coefficient A_j multiplies the determinant omitting orbital j
  // (1-based); that determinant is the basis tuple skipping site j-1.
  CVector hole(d);
  std::vector<int> tuple(n);
  for (int omit = 0; omit < d; ++omit) {
    int r = 0;
    for (int s = 0; s < d; ++s) {
      if (s != omit) tuple[r++] = s;
    }
    const std::size_t k = basis.rank({tuple.data(), tuple.size()});
    const Complex a = f.amplitudes()(static_cast<Eigen::Index>(k));
    const double sign = (omit % 2 == 0) ? -1.0 : 1.0;  // (-1)^j with j = omit + 1
    hole(omit) = sign * std::conj(a);
  }
  hole /= hole.norm();

  // Contraction of f with the conjugated hole over its last argument must
  // vanish identically; evaluated on ordered remaining arguments.
  double residual = 0.0;
  std::vector<int> args(n);
  if (n == 1) {
    Complex acc(0.0, 0.0);
    for (int z = 0; z < d; ++z) {
      args[0] = z;
      acc += f.pointwise({args.data(), args.size()}) * std::conj(hole(z));
    }
    residual = std::abs(acc);
  } else {
    const FockBasis rest(d, n - 1);
    for (std::size_t y = 0; y < rest.size(); ++y) {
      const auto lead = rest.state(y);
      std::copy(lead.begin(), lead.end(), args.begin());
      Complex acc(0.0, 0.0);
      for (int z = 0; z < d; ++z) {
        args[n - 1] = z;
        acc += f.pointwise({args.data(), args.size()}) * std::conj(hole(z));
      }
      residual = std::max(residual, std::abs(acc));
    }
  }

  Eigen::HouseholderQR<CMatrix> qr(hole);
  const CMatrix q = qr.householderQ() * CMatrix::Identity(d, d);
  CMatrix complement = q.rightCols(n);

  const WaveFunction slater = slater_determinant_state(f.basis_ptr(), complement);
  const Complex ov = inner(f, slater);
  double err = std::sqrt(2.0);
  if (std::abs(ov) > 1e-300) {
    const Complex phase = std::conj(ov) / std::abs(ov);
    err = (f.amplitudes() - phase * slater.amplitudes()).norm();
  }
  return HoleDecomposition{std::move(hole), std::move(complement), err, residual};
}

/// Closeness in inner product bounds closeness in density: with
/// eps = 1 - <f1|f2> (phases aligned) and delta1 the normalized L1 density
/// distance, delta1 <= sqrt(8 eps).
struct DensityBoundReport {
  double epsilon = 0.0;
  double delta1 = 0.0;
  bool bound_ok = false;
};

inline DensityBoundReport density_distance_bound_check(const WaveFunction& f1,
                                                       const WaveFunction& f2) {
  if (!(f1.basis() == f2.basis())) {
    throw DimensionError("density_distance_bound_check: basis mismatch");
  }
  const double eps = std::max(0.0, 1.0 - std::abs(inner(f1, f2)));
  const RVector n1 = density(f1);
  const RVector n2 = density(f2);
  const double delta1 = (n1 - n2).cwiseAbs().sum() / f1.basis().particles();
  const bool ok = delta1 <= std::sqrt(8.0 * eps) + 1e-10;
  return DensityBoundReport{eps, delta1, ok};
}

}  // namespace sforge
