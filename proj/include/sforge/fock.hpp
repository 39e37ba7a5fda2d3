// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "sforge/common.hpp"

namespace sforge {

/// Ordered enumeration of N-particle occupancy configurations of a
/// d-dimensional single-particle space. States are the strictly increasing
/// N-tuples over [0, d) in lexicographic order; there are C(d, N) of them.
/// Immutable after construction.
class FockBasis {
 public:
  FockBasis(int dim, int n_particles) : dim_(dim), n_(n_particles) {
    if (n_ < 1 || n_ > dim_) {
      throw DimensionError("FockBasis: need 1 <= n_particles <= dim, got n=" +
                           std::to_string(n_) + " d=" + std::to_string(dim_));
    }
    const std::uint64_t count = binomial(dim_, n_);
    if (count > (1ULL << 26)) {
      throw DimensionError("FockBasis: C(d,n) too large for dense storage");
    }
    size_ = static_cast<std::size_t>(count);
    occ_.resize(size_ * static_cast<std::size_t>(n_));
    std::vector<int> t(n_);
    for (int i = 0; i < n_; ++i) t[i] = i;
    for (std::size_t k = 0; k < size_; ++k) {
      std::copy(t.begin(), t.end(), occ_.begin() + k * n_);
      // advance to the next increasing tuple
      int i = n_ - 1;
      while (i >= 0 && t[i] == dim_ - n_ + i) --i;
      if (i < 0) break;
      ++t[i];
      for (int j = i + 1; j < n_; ++j) t[j] = t[j - 1] + 1;
    }
  }

  int dim() const { return dim_; }
  int particles() const { return n_; }
  std::size_t size() const { return size_; }

  std::span<const int> state(std::size_t k) const {
    return {occ_.data() + k * static_cast<std::size_t>(n_),
            static_cast<std::size_t>(n_)};
  }

  /// Lexicographic index of a strictly increasing tuple.
  std::size_t rank(std::span<const int> tuple) const {
    validate_tuple(tuple);
    std::uint64_t r = 0;
    int prev = -1;
    for (int i = 0; i < n_; ++i) {
      for (int v = prev + 1; v < tuple[i]; ++v) {
        r += binomial(dim_ - 1 - v, n_ - 1 - i);
      }
      prev = tuple[i];
    }
    return static_cast<std::size_t>(r);
  }

  std::span<const int> unrank(std::size_t k) const {
    if (k >= size_) throw DimensionError("FockBasis::unrank: index out of range");
    return state(k);
  }

  bool operator==(const FockBasis& other) const {
    return dim_ == other.dim_ && n_ == other.n_;
  }

 private:
  void validate_tuple(std::span<const int> tuple) const {
    if (static_cast<int>(tuple.size()) != n_) {
      throw DimensionError("FockBasis::rank: tuple arity mismatch");
    }
    int prev = -1;
    for (int x : tuple) {
      if (x <= prev || x >= dim_) {
        throw DimensionError("FockBasis::rank: tuple not strictly increasing in range");
      }
      prev = x;
    }
  }

  int dim_;
  int n_;
  std::size_t size_ = 0;
  std::vector<int> occ_;
};

inline std::shared_ptr<const FockBasis> make_fock_basis(int dim, int n_particles) {
  return std::make_shared<const FockBasis>(dim, n_particles);
}

/// Second-quantized amplitudes C_X over the ordered tuples of a FockBasis.
/// The pointwise first-quantized value on ordered arguments is C_X/sqrt(N!),
/// extended to arbitrary argument order by antisymmetry.
class WaveFunction {
 public:
  WaveFunction(std::shared_ptr<const FockBasis> basis, CVector amplitudes)
      : basis_(std::move(basis)), amps_(std::move(amplitudes)) {
    if (!basis_) throw DimensionError("WaveFunction: null basis");
    if (static_cast<std::size_t>(amps_.size()) != basis_->size()) {
      throw DimensionError("WaveFunction: amplitude length does not match basis size");
    }
  }

  const FockBasis& basis() const { return *basis_; }
  const std::shared_ptr<const FockBasis>& basis_ptr() const { return basis_; }
  const CVector& amplitudes() const { return amps_; }

  double norm() const { return amps_.norm(); }

  WaveFunction normalized() const {
    const double n = norm();
    if (n < 1e-300) throw NumericalError("WaveFunction::normalized: zero state");
    return WaveFunction(basis_, amps_ / n);
  }

  /// f(x_1, ..., x_N) at an arbitrary argument tuple: zero when two
  /// arguments coincide, otherwise sign(sort) * C_sorted / sqrt(N!).
  Complex pointwise(std::span<const int> args) const {
    const int n = basis_->particles();
    if (static_cast<int>(args.size()) != n) {
      throw DimensionError("WaveFunction::pointwise: argument arity mismatch");
    }
    int buf[64];
    if (n > 64) throw DimensionError("WaveFunction::pointwise: arity too large");
    for (int i = 0; i < n; ++i) {
      if (args[i] < 0 || args[i] >= basis_->dim()) {
        throw DimensionError("WaveFunction::pointwise: argument out of range");
      }
      buf[i] = args[i];
    }
    // insertion sort, counting transpositions
    int swaps = 0;
    for (int i = 1; i < n; ++i) {
      int v = buf[i];
      int j = i - 1;
      while (j >= 0 && buf[j] > v) {
        buf[j + 1] = buf[j];
        --j;
        ++swaps;
      }
      buf[j + 1] = v;
    }
    for (int i = 1; i < n; ++i) {
      if (buf[i] == buf[i - 1]) return Complex(0.0, 0.0);
    }
    const std::size_t k = basis_->rank(std::span<const int>(buf, n));
    double fact = 1.0;
    for (int i = 2; i <= n; ++i) fact *= i;
    const double sign = (swaps % 2 == 0) ? 1.0 : -1.0;
    return sign * amps_(static_cast<Eigen::Index>(k)) / std::sqrt(fact);
  }

 private:
  std::shared_ptr<const FockBasis> basis_;
  CVector amps_;
};

/// <a|b> with the physics convention (conjugate-linear in the first slot).
inline Complex inner(const WaveFunction& a, const WaveFunction& b) {
  if (!(a.basis() == b.basis())) {
    throw DimensionError("inner: wave functions live on different bases");
  }
  return a.amplitudes().dot(b.amplitudes());
}

}  // namespace sforge
