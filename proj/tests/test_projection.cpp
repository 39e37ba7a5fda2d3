// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>

#include <cmath>
#include <filesystem>

#include "sforge/io.hpp"
#include "sforge/projection.hpp"
#include "test_util.hpp"

using namespace sforge;

namespace {

// Raw unordered sum over all argument tuples, straight from the overlap
// definition; independent of the determinant path under test.
Complex eta_brute_force(const WaveFunction& f, const CMatrix& v, std::span<const int> cols) {
  const int n = f.basis().particles();
  const int d = f.basis().dim();
  double fact = 1.0;
  for (int i = 2; i <= n; ++i) fact *= i;
  Complex acc(0.0, 0.0);
  std::vector<int> args(n, 0);
  while (true) {
    Complex term = std::conj(f.pointwise({args.data(), args.size()}));
    for (int p = 0; p < n; ++p) term *= v(args[p], cols[p]);
    acc += term;
    int i = n - 1;
    while (i >= 0 && args[i] == d - 1) args[i--] = 0;
    if (i < 0) break;
    ++args[i];
  }
  return std::sqrt(fact) * acc;
}

}  // namespace

TEST_CASE("orbital sets must be orthonormal", "[projection]") {
  CMatrix v(3, 2);
  v << 1, 1, 0, 0, 0, 0;
  CHECK_THROWS_AS(OrbitalSet(v), DimensionError);
  CHECK_THROWS_AS(OrbitalSet(CMatrix::Zero(2, 3)), DimensionError);
}

TEST_CASE("a member determinant overlaps only its own configuration", "[projection]") {
  const int d = 6, n = 2, m = 4;
  const CMatrix v = testing::random_unitary(d, 31).leftCols(m);
  CMatrix chosen(d, n);
  chosen.col(0) = v.col(1);
  chosen.col(1) = v.col(3);
  const WaveFunction f = slater_determinant_state(make_fock_basis(d, n), chosen);
  const ConfigAmplitudes amps = eta_all(f, OrbitalSet(v));
  for (std::size_t j = 0; j < amps.configs->size(); ++j) {
    const auto cfg = amps.configs->state(j);
    const bool own = cfg[0] == 1 && cfg[1] == 3;
    const double expected = own ? 1.0 : 0.0;
    CHECK(std::abs(amps.values(static_cast<Eigen::Index>(j))) ==
          Approx(expected).margin(1e-12));
  }
  CHECK(amps.objective() == Approx(1.0).margin(1e-12));
}

TEST_CASE("orbitals outside the support give zero overlaps", "[projection]") {
  auto basis = make_fock_basis(4, 2);
  CVector c = CVector::Zero(static_cast<Eigen::Index>(basis->size()));
  const int occupied[] = {0, 1};
  c(static_cast<Eigen::Index>(basis->rank({occupied, 2}))) = 1.0;
  const WaveFunction f(basis, c);
  CMatrix v = CMatrix::Zero(4, 2);
  v(2, 0) = 1.0;
  v(3, 1) = 1.0;
  const ConfigAmplitudes amps = eta_all(f, OrbitalSet(v));
  CHECK(amps.values.cwiseAbs().maxCoeff() == Approx(0.0).margin(1e-14));
}

TEST_CASE("configuration overlaps match the raw unordered sum", "[projection]") {
  const int d = 4, n = 2, m = 3;
  const auto f = testing::random_wavefunction(make_fock_basis(d, n), 32);
  const CMatrix v = testing::random_unitary(d, 33).leftCols(m);
  const ConfigAmplitudes amps = eta_all(f, OrbitalSet(v));
  for (std::size_t j = 0; j < amps.configs->size(); ++j) {
    const Complex brute = eta_brute_force(f, v, amps.configs->state(j));
    CHECK(std::abs(amps.values(static_cast<Eigen::Index>(j)) - brute) < 1e-12);
  }
}

TEST_CASE("the full single-particle space captures everything", "[projection]") {
  const auto f = testing::random_wavefunction(make_fock_basis(5, 3), 34);
  CHECK(objective(f, OrbitalSet(testing::random_unitary(5, 35))) ==
        Approx(1.0).margin(1e-12));
}

TEST_CASE("contraction with slater partners recovers the missing orbital", "[projection]") {
  const int d = 7, n = 3;
  const CMatrix v = testing::random_unitary(d, 36).leftCols(n);
  const WaveFunction f = slater_determinant_state(make_fock_basis(d, n), v);
  const CVector g = contract_with_partners(f, v.rightCols(n - 1));
  REQUIRE(g.norm() > 1e-12);
  const CVector unit = g / g.norm();
  CHECK(std::abs(unit.dot(v.col(0))) == Approx(1.0).margin(1e-10));
  // antisymmetry makes the contraction orthogonal to the partners by itself
  for (int j = 1; j < n; ++j) {
    CHECK(std::abs(v.col(j).dot(g)) < 1e-10);
  }
}

TEST_CASE("two-particle contraction is a matrix-vector product", "[projection]") {
  const int d = 6;
  const auto f = testing::random_wavefunction(make_fock_basis(d, 2), 37);
  const CVector partner = testing::random_unitary(d, 38).col(0);
  const CVector g = contract_with_partners(f, partner);
  CMatrix fmat(d, d);
  for (int x = 0; x < d; ++x) {
    for (int y = 0; y < d; ++y) {
      const int args[] = {x, y};
      fmat(x, y) = f.pointwise({args, 2});
    }
  }
  const CVector expected = std::sqrt(2.0) * fmat * partner.conjugate();
  CHECK((g - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("three-particle contraction matches the raw double sum", "[projection]") {
  const int d = 5, n = 3;
  const auto f = testing::random_wavefunction(make_fock_basis(d, n), 39);
  const CMatrix partners = testing::random_unitary(d, 40).leftCols(n - 1);
  const CVector g = contract_with_partners(f, partners);
  for (int x = 0; x < d; ++x) {
    Complex acc(0.0, 0.0);
    for (int x2 = 0; x2 < d; ++x2) {
      for (int x3 = 0; x3 < d; ++x3) {
        const int args[] = {x, x2, x3};
        acc += f.pointwise({args, 3}) * std::conj(partners(x2, 0)) *
               std::conj(partners(x3, 1));
      }
    }
    acc *= std::sqrt(6.0);
    CHECK(std::abs(g(x) - acc) < 1e-12);
  }
}

TEST_CASE("contraction arity is checked", "[projection]") {
  const auto f = testing::random_wavefunction(make_fock_basis(5, 3), 41);
  CHECK_THROWS_AS(contract_with_partners(f, CMatrix::Identity(5, 1)), DimensionError);
  CHECK_THROWS_AS(contract_with_partners(f, CMatrix::Identity(4, 2)), DimensionError);
}

TEST_CASE("overlap evaluation requires matching dimensions", "[projection]") {
  const auto f = testing::random_wavefunction(make_fock_basis(5, 3), 41);
  CHECK_THROWS_AS(eta_all(f, OrbitalSet(CMatrix::Identity(6, 3))), DimensionError);
  CHECK_THROWS_AS(eta_all(f, OrbitalSet(CMatrix::Identity(5, 2))), DimensionError);
}

TEST_CASE("single-particle contraction returns the state itself", "[projection]") {
  const auto f = testing::random_wavefunction(make_fock_basis(5, 1), 42);
  const CVector g = contract_with_partners(f, CMatrix(5, 0));
  CHECK((g - f.amplitudes()).norm() == 0.0);
}

TEST_CASE("leading-slot overlap weight agrees between both routes", "[projection]") {
  const int d = 6, n = 3, m = 4;
  const auto f = testing::random_wavefunction(make_fock_basis(d, n), 43);
  const CMatrix v = testing::random_unitary(d, 44).leftCols(m);
  const ConfigAmplitudes amps = eta_all(f, OrbitalSet(v));
  double from_eta = 0.0;
  for (std::size_t j = 0; j < amps.configs->size(); ++j) {
    if (amps.configs->state(j)[0] == 0) {
      from_eta += std::norm(amps.values(static_cast<Eigen::Index>(j)));
    }
  }
  double from_g = 0.0;
  const FockBasis partner_combos(m - 1, n - 1);
  CMatrix partners(d, n - 1);
  for (std::size_t q = 0; q < partner_combos.size(); ++q) {
    const auto combo = partner_combos.state(q);
    for (int i = 0; i < n - 1; ++i) partners.col(i) = v.col(combo[i] + 1);
    const CVector g = contract_with_partners(f, partners);
    from_g += std::norm(g.dot(v.col(0)));
  }
  CHECK(from_g == Approx(from_eta).margin(1e-12));
}

TEST_CASE("objective is invariant under in-subspace rotations", "[projection]") {
  const int d = 7, n = 2, m = 4;
  const auto f = testing::random_wavefunction(make_fock_basis(d, n), 45);
  const CMatrix v = testing::random_unitary(d, 46).leftCols(m);
  const CMatrix r = testing::random_unitary(m, 47);
  const double before = objective(f, OrbitalSet(v));
  const double after = objective(f, OrbitalSet(v * r));
  CHECK(after == Approx(before).margin(1e-10));
}

TEST_CASE("appending an orbital never loses weight", "[projection]") {
  const int d = 7, n = 2;
  const auto f = testing::random_wavefunction(make_fock_basis(d, n), 48);
  const CMatrix full = testing::random_unitary(d, 49);
  double prev = 0.0;
  for (int m = n; m <= d; ++m) {
    const double cur = objective(f, OrbitalSet(full.leftCols(m)));
    CHECK(cur >= prev - 1e-12);
    prev = cur;
  }
  CHECK(prev == Approx(1.0).margin(1e-12));
}

TEST_CASE("reconstruction reproduces an in-subspace state", "[projection]") {
  const int d = 6, n = 2, m = 3;
  auto basis = make_fock_basis(d, n);
  const CMatrix v = testing::random_unitary(d, 50).leftCols(m);
  // random combination of the configuration determinants
  detail::GaussianSource gauss(51);
  CVector mix = CVector::Zero(static_cast<Eigen::Index>(basis->size()));
  const FockBasis configs(m, n);
  for (std::size_t j = 0; j < configs.size(); ++j) {
    CMatrix cols(d, n);
    const auto cfg = configs.state(j);
    for (int q = 0; q < n; ++q) cols.col(q) = v.col(cfg[q]);
    mix += gauss.complex_normal() * slater_determinant_state(basis, cols).amplitudes();
  }
  mix /= mix.norm();
  const WaveFunction f(basis, mix);

  const OrbitalSet orbitals(v);
  const ConfigAmplitudes amps = eta_all(f, orbitals);
  CHECK(amps.objective() == Approx(1.0).margin(1e-10));
  const WaveFunction w = reconstruct_approximant(amps, orbitals, basis);
  Complex phase = inner(f, w);
  CHECK(std::abs(phase) == Approx(1.0).margin(1e-10));
  CHECK(phase.imag() == Approx(0.0).margin(1e-10));
  CHECK((w.amplitudes() - f.amplitudes()).norm() < 1e-9);
}

TEST_CASE("reconstruction overlap equals the square root of the objective",
          "[projection]") {
  const int d = 7, n = 3, m = 4;
  auto basis = make_fock_basis(d, n);
  const auto f = testing::random_wavefunction(basis, 52);
  const OrbitalSet orbitals(testing::random_unitary(d, 53).leftCols(m));
  const ConfigAmplitudes amps = eta_all(f, orbitals);
  const WaveFunction w = reconstruct_approximant(amps, orbitals, basis);
  CHECK(w.norm() == Approx(1.0).margin(1e-12));
  const Complex overlap = inner(f, w);
  CHECK(overlap.imag() == Approx(0.0).margin(1e-10));
  CHECK(overlap.real() == Approx(std::sqrt(amps.objective())).margin(1e-10));
  // re-evaluating the reconstruction under the same orbitals returns the
  // same projection weight
  CHECK(objective(w, orbitals) == Approx(1.0).margin(1e-10));
}

TEST_CASE("reconstruction refuses a state with no overlap", "[projection]") {
  auto basis = make_fock_basis(4, 2);
  CVector c = CVector::Zero(static_cast<Eigen::Index>(basis->size()));
  const int occupied[] = {2, 3};
  c(static_cast<Eigen::Index>(basis->rank({occupied, 2}))) = 1.0;
  const WaveFunction f(basis, c);
  const OrbitalSet orbitals(CMatrix::Identity(4, 2));
  const ConfigAmplitudes amps = eta_all(f, orbitals);
  CHECK_THROWS_AS(reconstruct_approximant(amps, orbitals, basis), NumericalError);
}

TEST_CASE("orbital files round-trip bit-exactly", "[projection][io]") {
  namespace fs = std::filesystem;
  const OrbitalSet orbitals(testing::random_unitary(6, 54).leftCols(3));
  const fs::path dir = fs::temp_directory_path() / "sforge_test_orb";
  fs::create_directories(dir);
  write_orbitals(dir / "v.orb", orbitals);
  const OrbitalSet back = read_orbitals(dir / "v.orb");
  REQUIRE(back.dim() == orbitals.dim());
  REQUIRE(back.count() == orbitals.count());
  for (int i = 0; i < orbitals.dim(); ++i) {
    for (int j = 0; j < orbitals.count(); ++j) {
      REQUIRE(back.matrix()(i, j) == orbitals.matrix()(i, j));
    }
  }
  fs::remove_all(dir);
}

TEST_CASE("configuration overlap files carry one-based orbital labels",
          "[projection][io]") {
  namespace fs = std::filesystem;
  const auto f = testing::random_wavefunction(make_fock_basis(4, 2), 55);
  const ConfigAmplitudes amps = eta_all(f, OrbitalSet(testing::random_unitary(4, 56).leftCols(3)));
  const fs::path dir = fs::temp_directory_path() / "sforge_test_eta";
  fs::create_directories(dir);
  write_config_amplitudes(dir / "eta.csv", amps);
  std::ifstream in(dir / "eta.csv");
  std::string header, first;
  std::getline(in, header);
  std::getline(in, first);
  CHECK(header == "j1,j2,re,im");
  CHECK(first.rfind("1,2,", 0) == 0);
  fs::remove_all(dir);
}
