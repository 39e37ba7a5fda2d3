// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "sforge/common.hpp"

namespace sforge::detail {

/// Determinant of a small dense complex matrix. Hand-rolled up to 3x3,
/// partial-pivot LU above. The LU object is reused across calls so repeated
/// evaluation at a fixed size does not reallocate.
class Determinant {
 public:
  Complex operator()(const CMatrix& a) {
    const auto n = a.rows();
    switch (n) {
      case 0:
        return Complex(1.0, 0.0);
      case 1:
        return a(0, 0);
      case 2:
        return a(0, 0) * a(1, 1) - a(0, 1) * a(1, 0);
      case 3:
        return a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1)) -
               a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0)) +
               a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0));
      default:
        lu_.compute(a);
        return lu_.determinant();
    }
  }

 private:
  Eigen::PartialPivLU<CMatrix> lu_;
};

/// Copies the selected rows of src into dst (resized to rows.size() x cols).
template <typename Index>
void gather_rows(const CMatrix& src, const Index* rows, int n_rows, CMatrix& dst) {
  dst.resize(n_rows, src.cols());
  for (int i = 0; i < n_rows; ++i) dst.row(i) = src.row(rows[i]);
}

/// Modified Gram-Schmidt with a second orthogonalization pass. Preserves
/// column order. Throws if a column is numerically dependent on its
/// predecessors.
inline void orthonormalize_columns(CMatrix& v) {
  const auto m = v.cols();
  for (int pass = 0; pass < 2; ++pass) {
    for (int j = 0; j < m; ++j) {
      for (int i = 0; i < j; ++i) {
        v.col(j) -= v.col(i).dot(v.col(j)) * v.col(i);
      }
      const double nrm = v.col(j).norm();
      if (nrm < 1e-12) {
        throw NumericalError("orthonormalize_columns: rank-deficient input");
      }
      v.col(j) /= nrm;
    }
  }
}

/// Multiplies v by a unit phase so its largest-magnitude entry is real
/// positive. Deterministic tie-break: first index attaining the maximum.
inline void fix_phase(Eigen::Ref<CVector> v) {
  int arg = 0;
  double best = -1.0;
  for (int i = 0; i < v.size(); ++i) {
    const double m = std::abs(v(i));
    if (m > best) {
      best = m;
      arg = i;
    }
  }
  if (best <= 0.0) return;
  v *= std::conj(v(arg)) / best;
}

/// Deterministic standard-normal source (Box-Muller over mt19937_64).
/// std::normal_distribution is implementation-defined, this is not.
class GaussianSource {
 public:
  explicit GaussianSource(std::uint64_t seed) : rng_(seed) {}

  double operator()() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

  Complex complex_normal() { return Complex((*this)(), (*this)()); }

 private:
  double uniform() {
    return static_cast<double>(rng_() >> 11) * 0x1.0p-53;
  }

  std::mt19937_64 rng_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

/// d x m matrix with i.i.d. complex standard-normal entries.
inline CMatrix gaussian_matrix(int d, int m, std::uint64_t seed) {
  GaussianSource gauss(seed);
  CMatrix a(d, m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < d; ++i) a(i, j) = gauss.complex_normal();
  }
  return a;
}

}  // namespace sforge::detail
