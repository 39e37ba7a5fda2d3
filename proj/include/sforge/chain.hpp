// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <iostream>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "sforge/common.hpp"
#include "sforge/fock.hpp"
#include "sforge/linalg.hpp"

namespace sforge {

/// Spinless fermions on an open chain: hopping amplitude fixed to 1,
/// nearest-neighbor interaction U, optional confinement to the leftmost
/// `confinement` sites.
struct ChainSpec {
  int length = 0;
  int n_particles = 0;
  double interaction = 0.0;
  std::optional<int> confinement;

  void validate() const {
    if (n_particles < 1 || n_particles > length) {
      throw DimensionError("ChainSpec: need 1 <= N <= L");
    }
    if (confinement && (*confinement < n_particles || *confinement > length)) {
      throw DimensionError("ChainSpec: need N <= L_i <= L");
    }
  }

  /// Number of sites the Hamiltonian acts on (L_i when confined).
  int active_length() const { return confinement.value_or(length); }
};

/// Real symmetric Hamiltonian over FockBasis(active_length, N): hopping -1
/// between configurations that differ by one particle moved to an adjacent
/// empty site, diagonal U times the number of adjacent occupied pairs.
/// Open boundary, so no bond between the last and first site. With the
/// site-ascending creation-operator convention a nearest-neighbor hop crosses
/// no occupied sites, so every hopping element is exactly -1.
inline RMatrix build_hamiltonian(const ChainSpec& spec) {
  spec.validate();
  const int l = spec.active_length();
  const int n = spec.n_particles;
  const FockBasis basis(l, n);
  const auto size = static_cast<Eigen::Index>(basis.size());
  RMatrix h = RMatrix::Zero(size, size);

  std::vector<int> moved(n);
  std::vector<char> occ(l);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto x = basis.state(k);
    std::fill(occ.begin(), occ.end(), 0);
    for (int s : x) occ[s] = 1;

    int pairs = 0;
    for (int s = 0; s + 1 < l; ++s) {
      if (occ[s] && occ[s + 1]) ++pairs;
    }
    h(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) =
        spec.interaction * pairs;

    for (int i = 0; i < n; ++i) {
      for (int dir : {-1, +1}) {
        const int target = x[i] + dir;
        if (target < 0 || target >= l || occ[target]) continue;
        // target is empty and adjacent, so the tuple stays strictly increasing
        for (int j = 0; j < n; ++j) moved[j] = x[j];
        moved[i] = target;
        const std::size_t kk = basis.rank({moved.data(), moved.size()});
        h(static_cast<Eigen::Index>(kk), static_cast<Eigen::Index>(k)) = -1.0;
      }
    }
  }
  return h;
}

/// Full eigensystem of a real symmetric matrix, eigenvalues ascending.
struct SpectralDecomposition {
  RVector eigenvalues;
  RMatrix eigenvectors;  // columns
};

inline SpectralDecomposition spectral_decomposition(const RMatrix& h) {
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("spectral_decomposition: eigensolver failed");
  }
  return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

struct GroundStateInfo {
  WaveFunction state;
  double energy;
  double gap;  // to the first excited level
  bool degenerate;
};

/// Lowest eigenvector over FockBasis(active_length, N), with the global
/// phase fixed so the largest-magnitude amplitude is real positive. Warns on
/// stderr when the ground level is degenerate and returns one eigenvector.
inline GroundStateInfo ground_state_info(const ChainSpec& spec) {
  spec.validate();
  const RMatrix h = build_hamiltonian(spec);
  const SpectralDecomposition sd = spectral_decomposition(h);
  auto basis = make_fock_basis(spec.active_length(), spec.n_particles);
  CVector amps = sd.eigenvectors.col(0).cast<Complex>();
  detail::fix_phase(amps);
  const double e0 = sd.eigenvalues(0);
  const double gap =
      sd.eigenvalues.size() > 1 ? sd.eigenvalues(1) - e0 : std::numeric_limits<double>::infinity();
  const bool degenerate = gap < 1e-10 * std::max(1.0, std::abs(e0));
  if (degenerate) {
    std::cerr << "warning: degenerate ground level (gap " << gap
              << "); returning one eigenvector\n";
  }
  return GroundStateInfo{WaveFunction(std::move(basis), std::move(amps)), e0, gap, degenerate};
}

inline WaveFunction ground_state(const ChainSpec& spec) {
  return ground_state_info(spec).state;
}

/// Ground state of the confined chain embedded into the full L-site basis:
/// amplitudes are copied onto the configurations supported on the leftmost
/// L_i sites, every other configuration is exactly zero.
inline WaveFunction confined_ground_state(const ChainSpec& spec) {
  spec.validate();
  if (!spec.confinement) {
    throw DimensionError("confined_ground_state: spec has no confinement");
  }
  const WaveFunction inner_state = ground_state(spec);
  auto full = make_fock_basis(spec.length, spec.n_particles);
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(full->size()));
  const FockBasis& small = inner_state.basis();
  for (std::size_t k = 0; k < small.size(); ++k) {
    const std::size_t kk = full->rank(small.state(k));
    amps(static_cast<Eigen::Index>(kk)) =
        inner_state.amplitudes()(static_cast<Eigen::Index>(k));
  }
  return WaveFunction(std::move(full), std::move(amps));
}

/// Exact propagator from the full spectral decomposition of the unconfined
/// L-site Hamiltonian; no time-stepping error at any t. Confinement on the
/// spec is ignored here: it only shapes initial states.
class Propagator {
 public:
  explicit Propagator(const ChainSpec& spec)
      : spec_{spec.length, spec.n_particles, spec.interaction, std::nullopt},
        basis_(make_fock_basis(spec.length, spec.n_particles)),
        sd_(spectral_decomposition(build_hamiltonian(spec_))) {}

  const SpectralDecomposition& decomposition() const { return sd_; }
  const std::shared_ptr<const FockBasis>& basis() const { return basis_; }

  /// Expansion of a state over the eigenvectors.
  CVector mode_coefficients(const WaveFunction& psi0) const {
    check(psi0);
    return sd_.eigenvectors.transpose() * psi0.amplitudes();
  }

  WaveFunction state_at(const CVector& coeffs, double t) const {
    CVector phased(coeffs.size());
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      phased(k) = std::exp(Complex(0.0, -sd_.eigenvalues(k) * t)) * coeffs(k);
    }
    return WaveFunction(basis_, sd_.eigenvectors * phased);
  }

  WaveFunction evolve(const WaveFunction& psi0, double t) const {
    return state_at(mode_coefficients(psi0), t);
  }

  double energy(const CVector& coeffs) const {
    double e = 0.0;
    for (Eigen::Index k = 0; k < coeffs.size(); ++k) {
      e += sd_.eigenvalues(k) * std::norm(coeffs(k));
    }
    return e;
  }

 private:
  void check(const WaveFunction& psi0) const {
    if (!(psi0.basis() == *basis_)) {
      throw DimensionError("Propagator: state basis does not match the Hamiltonian");
    }
  }

  ChainSpec spec_;
  std::shared_ptr<const FockBasis> basis_;
  SpectralDecomposition sd_;
};

inline WaveFunction evolve(const ChainSpec& spec, const WaveFunction& psi0, double t) {
  return Propagator(spec).evolve(psi0, t);
}

/// Site occupation expectations <n_i>; entries in [0,1], summing to N.
inline RVector density(const WaveFunction& f) {
  const FockBasis& basis = f.basis();
  RVector n = RVector::Zero(basis.dim());
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double w = std::norm(f.amplitudes()(static_cast<Eigen::Index>(k)));
    if (w == 0.0) continue;
    for (int s : basis.state(k)) n(s) += w;
  }
  return n;
}

/// U * sum_i <n_i n_{i+1}>.
inline double interaction_energy(const WaveFunction& f, double u) {
  const FockBasis& basis = f.basis();
  double acc = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double w = std::norm(f.amplitudes()(static_cast<Eigen::Index>(k)));
    if (w == 0.0) continue;
    const auto x = basis.state(k);
    int pairs = 0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      if (x[i + 1] == x[i] + 1) ++pairs;
    }
    acc += w * pairs;
  }
  return u * acc;
}

inline double energy_expectation(const RMatrix& h, const WaveFunction& f) {
  return (f.amplitudes().adjoint() * (h * f.amplitudes()))(0, 0).real();
}

/// Single-particle open-chain Hamiltonian (tridiagonal, hopping -1).
inline RMatrix single_particle_hamiltonian(int length) {
  RMatrix h = RMatrix::Zero(length, length);
  for (int i = 0; i + 1 < length; ++i) {
    h(i, i + 1) = -1.0;
    h(i + 1, i) = -1.0;
  }
  return h;
}

/// Time-evolved images of the leftmost n_modes site orbitals under the free
/// chain: columns of exp(-i H1 t) restricted to the first n_modes sites.
/// They stay orthonormal, and they span the orbital space of any state
/// released from those sites under U = 0 evolution.
inline CMatrix propagated_confined_modes(int length, int n_modes, double t) {
  if (n_modes < 1 || n_modes > length) {
    throw DimensionError("propagated_confined_modes: need 1 <= n_modes <= L");
  }
  const RMatrix h1 = single_particle_hamiltonian(length);
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(h1);
  if (solver.info() != Eigen::Success) {
    throw NumericalError("propagated_confined_modes: eigensolver failed");
  }
  const RMatrix& v = solver.eigenvectors();
  const RVector& e = solver.eigenvalues();
  CMatrix out(length, n_modes);
  CVector phase(length);
  for (int k = 0; k < length; ++k) phase(k) = std::exp(Complex(0.0, -e(k) * t));
  for (int j = 0; j < n_modes; ++j) {
    CVector c = (v.transpose() * RVector::Unit(length, j)).cast<Complex>();
    out.col(j) = v.cast<Complex>() * phase.cwiseProduct(c);
  }
  return out;
}

}  // namespace sforge
