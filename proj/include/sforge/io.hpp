// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sforge/common.hpp"
#include "sforge/fock.hpp"
#include "sforge/projection.hpp"

namespace sforge {

namespace detail {

/// 17 significant digits: lossless text round-trip for IEEE doubles.
inline std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

inline std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open for reading: " + path.string());
  return in;
}

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open for writing: " + path.string());
  return out;
}

}  // namespace detail

/// Text dump, one line per basis state: `index x1,...,xN re im` under a
/// `# d=<d> n=<n> count=<D>` header.
inline void write_wavefunction(const std::filesystem::path& path, const WaveFunction& f) {
  auto out = detail::open_output(path);
  const FockBasis& basis = f.basis();
  out << "# d=" << basis.dim() << " n=" << basis.particles() << " count=" << basis.size()
      << "\n";
  for (std::size_t k = 0; k < basis.size(); ++k) {
    out << k << ' ';
    const auto x = basis.state(k);
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (i) out << ',';
      out << x[i];
    }
    const Complex c = f.amplitudes()(static_cast<Eigen::Index>(k));
    out << ' ' << detail::fmt17(c.real()) << ' ' << detail::fmt17(c.imag()) << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

inline WaveFunction read_wavefunction(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string header;
  std::getline(in, header);
  int d = 0, n = 0;
  long long count = 0;
  if (std::sscanf(header.c_str(), "# d=%d n=%d count=%lld", &d, &n, &count) != 3) {
    throw ConfigError("bad wave-function header in " + path.string());
  }
  auto basis = make_fock_basis(d, n);
  if (static_cast<long long>(basis->size()) != count) {
    throw ConfigError("wave-function count mismatch in " + path.string());
  }
  CVector amps(static_cast<Eigen::Index>(basis->size()));
  std::string line;
  std::vector<int> tuple(n);
  for (std::size_t k = 0; k < basis->size(); ++k) {
    if (!std::getline(in, line)) {
      throw ConfigError("truncated wave-function dump: " + path.string());
    }
    std::istringstream ls(line);
    std::size_t index = 0;
    ls >> index;
    std::string occ;
    ls >> occ;
    double re = 0.0, im = 0.0;
    ls >> re >> im;
    if (!ls || index != k) {
      throw ConfigError("bad wave-function record at line " + std::to_string(k + 2));
    }
    std::istringstream os(occ);
    for (int i = 0; i < n; ++i) {
      char sep = 0;
      if (i && !(os >> sep && sep == ',')) {
        throw ConfigError("bad occupation tuple at line " + std::to_string(k + 2));
      }
      if (!(os >> tuple[i])) {
        throw ConfigError("bad occupation tuple at line " + std::to_string(k + 2));
      }
    }
    if (basis->rank({tuple.data(), tuple.size()}) != k) {
      throw ConfigError("occupation tuple out of order at line " + std::to_string(k + 2));
    }
    amps(static_cast<Eigen::Index>(k)) = Complex(re, im);
  }
  return WaveFunction(std::move(basis), std::move(amps));
}

/// Text orbital file: `# d=<d> M=<M>` header, then d rows of 2M floats with
/// real and imaginary parts interleaved.
inline void write_orbitals(const std::filesystem::path& path, const OrbitalSet& orbitals) {
  auto out = detail::open_output(path);
  const CMatrix& v = orbitals.matrix();
  out << "# d=" << orbitals.dim() << " M=" << orbitals.count() << "\n";
  for (int i = 0; i < orbitals.dim(); ++i) {
    for (int j = 0; j < orbitals.count(); ++j) {
      if (j) out << ' ';
      out << detail::fmt17(v(i, j).real()) << ' ' << detail::fmt17(v(i, j).imag());
    }
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

inline OrbitalSet read_orbitals(const std::filesystem::path& path) {
  auto in = detail::open_input(path);
  std::string header;
  std::getline(in, header);
  int d = 0, m = 0;
  if (std::sscanf(header.c_str(), "# d=%d M=%d", &d, &m) != 2) {
    throw ConfigError("bad orbital-set header in " + path.string());
  }
  CMatrix v(d, m);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < m; ++j) {
      double re = 0.0, im = 0.0;
      if (!(in >> re >> im)) {
        throw ConfigError("truncated orbital set: " + path.string());
      }
      v(i, j) = Complex(re, im);
    }
  }
  return OrbitalSet(std::move(v));
}

/// d x d CSV of (re, im) pairs, row-major.
inline void write_complex_matrix(const std::filesystem::path& path, const CMatrix& m) {
  auto out = detail::open_output(path);
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << detail::fmt17(m(i, j).real()) << ',' << detail::fmt17(m(i, j).imag());
    }
    out << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

/// CSV of configuration overlaps, orbitals numbered from 1.
inline void write_config_amplitudes(const std::filesystem::path& path,
                                    const ConfigAmplitudes& amps) {
  auto out = detail::open_output(path);
  const int n = amps.configs->particles();
  for (int i = 1; i <= n; ++i) out << 'j' << i << ',';
  out << "re,im\n";
  for (std::size_t k = 0; k < amps.configs->size(); ++k) {
    for (int j : amps.configs->state(k)) out << (j + 1) << ',';
    const Complex c = amps.values(static_cast<Eigen::Index>(k));
    out << detail::fmt17(c.real()) << ',' << detail::fmt17(c.imag()) << "\n";
  }
  if (!out) throw ConfigError("write failed: " + path.string());
}

}  // namespace sforge
