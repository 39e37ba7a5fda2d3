// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>

#include "sforge/fock.hpp"
#include "sforge/linalg.hpp"
#include "sforge/projection.hpp"

namespace sforge::testing {

/// Normalized state with i.i.d. complex Gaussian amplitudes.
inline WaveFunction random_wavefunction(std::shared_ptr<const FockBasis> basis,
                                        std::uint64_t seed) {
  detail::GaussianSource gauss(seed);
  CVector amps(static_cast<Eigen::Index>(basis->size()));
  for (Eigen::Index i = 0; i < amps.size(); ++i) amps(i) = gauss.complex_normal();
  amps /= amps.norm();
  return WaveFunction(std::move(basis), std::move(amps));
}

/// Random Slater determinant over d sites with n particles.
inline WaveFunction random_slater(std::shared_ptr<const FockBasis> basis, std::uint64_t seed) {
  CMatrix v = detail::gaussian_matrix(basis->dim(), basis->particles(), seed);
  detail::orthonormalize_columns(v);
  return slater_determinant_state(std::move(basis), v);
}

/// Haar-ish random unitary from the QR of a Gaussian matrix.
inline CMatrix random_unitary(int n, std::uint64_t seed) {
  CMatrix a = detail::gaussian_matrix(n, n, seed);
  detail::orthonormalize_columns(a);
  return a;
}

/// Analytic single-particle modes of the open chain: standing sine waves.
/// Mode k (0-based) has energy -2 cos(pi (k+1) / (L+1)).
inline RMatrix open_chain_modes(int length) {
  RMatrix v(length, length);
  const double norm = std::sqrt(2.0 / (length + 1));
  for (int k = 0; k < length; ++k) {
    for (int j = 0; j < length; ++j) {
      v(j, k) = norm * std::sin(M_PI * (k + 1) * (j + 1) / (length + 1));
    }
  }
  return v;
}

inline double open_chain_energy(int length, int mode) {
  return -2.0 * std::cos(M_PI * (mode + 1) / (length + 1));
}

}  // namespace sforge::testing
