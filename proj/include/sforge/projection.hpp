// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <memory>
#include <utility>

#include "sforge/common.hpp"
#include "sforge/fock.hpp"
#include "sforge/linalg.hpp"

namespace sforge {

/// M orthonormal single-particle orbitals as the columns of a d x M matrix.
class OrbitalSet {
 public:
  static constexpr double kOrthoTol = 1e-10;

  explicit OrbitalSet(CMatrix columns) : v_(std::move(columns)) {
    if (v_.cols() < 1 || v_.cols() > v_.rows()) {
      throw DimensionError("OrbitalSet: need 1 <= M <= d");
    }
    CMatrix gram = v_.adjoint() * v_;
    gram.diagonal().array() -= 1.0;
    if (gram.cwiseAbs().maxCoeff() > kOrthoTol) {
      throw DimensionError("OrbitalSet: columns are not orthonormal");
    }
  }

  int dim() const { return static_cast<int>(v_.rows()); }
  int count() const { return static_cast<int>(v_.cols()); }
  const CMatrix& matrix() const { return v_; }

 private:
  CMatrix v_;
};

/// Overlaps between a target state and every N-orbital configuration of an
/// orbital set, indexed by the lexicographic combinations of {0..M-1}.
struct ConfigAmplitudes {
  std::shared_ptr<const FockBasis> configs;  // dim = M, particles = N
  CVector values;

  /// Squared norm of the projection onto the configuration subspace.
  double objective() const { return values.squaredNorm(); }
};

namespace detail {

inline void require_compatible(const WaveFunction& f, const OrbitalSet& v) {
  if (f.basis().dim() != v.dim()) {
    throw DimensionError("orbital set dimension does not match wave function");
  }
  if (f.basis().particles() > v.count()) {
    throw DimensionError("need at least N orbitals");
  }
}

}  // namespace detail

/// Overlap of the target state with every configuration determinant.
/// Each value is sum_X conj(C_X) det(V[X, J]).
inline ConfigAmplitudes eta_all(const WaveFunction& f, const OrbitalSet& orbitals) {
  detail::require_compatible(f, orbitals);
  const FockBasis& basis = f.basis();
  const int n = basis.particles();
  const int m = orbitals.count();
  auto configs = make_fock_basis(m, n);
  CVector values = CVector::Zero(static_cast<Eigen::Index>(configs->size()));

  const CMatrix& v = orbitals.matrix();
  CMatrix rows(n, m), sub(n, n);
  detail::Determinant det;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto x = basis.state(k);
    detail::gather_rows(v, x.data(), n, rows);
    const Complex cc = std::conj(f.amplitudes()(static_cast<Eigen::Index>(k)));
    for (std::size_t j = 0; j < configs->size(); ++j) {
      const auto cols = configs->state(j);
      for (int q = 0; q < n; ++q) sub.col(q) = rows.col(cols[q]);
      values(static_cast<Eigen::Index>(j)) += cc * det(sub);
    }
  }
  return ConfigAmplitudes{std::move(configs), std::move(values)};
}

/// Projection weight of f in the configuration subspace of the orbital set.
inline double objective(const WaveFunction& f, const OrbitalSet& orbitals) {
  return eta_all(f, orbitals).objective();
}

/// Contracts f with N-1 fixed partner orbitals, leaving the single-particle
/// function g with <g|phi> equal to the configuration overlap obtained by
/// completing the partners with phi. Accumulated over ordered tuples via
/// signed minors of the partner matrix. For N = 1 the result is f itself.
inline CVector contract_with_partners(const WaveFunction& f, const CMatrix& partners) {
  const FockBasis& basis = f.basis();
  const int n = basis.particles();
  const int d = basis.dim();
  if (partners.rows() != d) {
    throw DimensionError("contract_with_partners: partner dimension mismatch");
  }
  if (static_cast<int>(partners.cols()) != n - 1) {
    throw DimensionError("contract_with_partners: need exactly N-1 partners");
  }
  if (n == 1) return f.amplitudes();

  CVector g = CVector::Zero(d);
  CMatrix rows(n, n - 1), minor(n - 1, n - 1);
  detail::Determinant det;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const auto x = basis.state(k);
    const Complex c = f.amplitudes()(static_cast<Eigen::Index>(k));
    if (c == Complex(0.0, 0.0)) continue;
    detail::gather_rows(partners, x.data(), n, rows);
    for (int m = 0; m < n; ++m) {
      int r = 0;
      for (int i = 0; i < n; ++i) {
        if (i == m) continue;
        minor.row(r++) = rows.row(i);
      }
      const Complex dm = det(minor);
      const double sign = (m % 2 == 0) ? 1.0 : -1.0;
      g(x[m]) += c * sign * std::conj(dm);
    }
  }
  return g;
}

/// Slater determinant of the given orbital columns, expanded over basis.
/// Amplitude on tuple X is det(orbitals[X, :]).
inline WaveFunction slater_determinant_state(std::shared_ptr<const FockBasis> basis,
                                             const CMatrix& orbitals) {
  if (orbitals.rows() != basis->dim() ||
      static_cast<int>(orbitals.cols()) != basis->particles()) {
    throw DimensionError("slater_determinant_state: orbital shape mismatch");
  }
  const int n = basis->particles();
  CVector amps(static_cast<Eigen::Index>(basis->size()));
  CMatrix rows(n, n);
  detail::Determinant det;
  for (std::size_t k = 0; k < basis->size(); ++k) {
    detail::gather_rows(orbitals, basis->state(k).data(), n, rows);
    amps(static_cast<Eigen::Index>(k)) = det(rows);
  }
  return WaveFunction(std::move(basis), std::move(amps));
}

/// Best in-subspace state for fixed orbitals: coefficients proportional to
/// the conjugated configuration overlaps.
struct ApproximantState {
  OrbitalSet orbitals;
  CVector coefficients;  // unit norm, aligned with the configs enumeration
};

inline ApproximantState make_approximant(const ConfigAmplitudes& amps,
                                         const OrbitalSet& orbitals) {
  const double weight = amps.objective();
  if (weight <= 0.0) {
    throw NumericalError("make_approximant: state has no overlap with the subspace");
  }
  CVector coeff = amps.values.conjugate() / std::sqrt(weight);
  for (Eigen::Index j = 0; j < coeff.size(); ++j) {
    if (std::abs(amps.values(j)) < 1e-15) coeff(j) = Complex(0.0, 0.0);
  }
  const double nrm = coeff.norm();
  if (nrm < 1e-300) {
    throw NumericalError("make_approximant: state has no overlap with the subspace");
  }
  coeff /= nrm;
  return ApproximantState{orbitals, std::move(coeff)};
}

/// Expands the approximant into the full Fock basis. The result is
/// normalized and phased so that <f|W> is real positive for the f the
/// amplitudes were computed from.
inline WaveFunction reconstruct_approximant(const ConfigAmplitudes& amps,
                                            const OrbitalSet& orbitals,
                                            std::shared_ptr<const FockBasis> basis) {
  if (basis->dim() != orbitals.dim() ||
      basis->particles() != amps.configs->particles()) {
    throw DimensionError("reconstruct_approximant: basis mismatch");
  }
  const ApproximantState a = make_approximant(amps, orbitals);
  const int n = basis->particles();
  const CMatrix& v = orbitals.matrix();
  CVector out = CVector::Zero(static_cast<Eigen::Index>(basis->size()));
  CMatrix rows(n, v.cols()), sub(n, n);
  detail::Determinant det;
  for (std::size_t k = 0; k < basis->size(); ++k) {
    detail::gather_rows(v, basis->state(k).data(), n, rows);
    Complex acc(0.0, 0.0);
    for (std::size_t j = 0; j < amps.configs->size(); ++j) {
      const Complex cj = a.coefficients(static_cast<Eigen::Index>(j));
      if (cj == Complex(0.0, 0.0)) continue;
      const auto cols = amps.configs->state(j);
      for (int q = 0; q < n; ++q) sub.col(q) = rows.col(cols[q]);
      acc += cj * det(sub);
    }
    out(static_cast<Eigen::Index>(k)) = acc;
  }
  const double nrm = out.norm();
  if (nrm < 1e-300) throw NumericalError("reconstruct_approximant: vanishing result");
  out /= nrm;
  return WaveFunction(std::move(basis), std::move(out));
}

}  // namespace sforge
