// Copyright 2026 The slater-forge Authors
// SPDX-License-Identifier: Apache-2.0

#include <catch2/catch.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "sforge/fock.hpp"
#include "sforge/io.hpp"
#include "test_util.hpp"

using namespace sforge;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("basis enumeration is lexicographic over increasing tuples", "[fock]") {
  const FockBasis basis(3, 2);
  REQUIRE(basis.size() == 3);
  const std::vector<std::vector<int>> expected = {{0, 1}, {0, 2}, {1, 2}};
  for (std::size_t k = 0; k < 3; ++k) {
    const auto s = basis.state(k);
    REQUIRE(std::vector<int>(s.begin(), s.end()) == expected[k]);
  }
}

TEST_CASE("basis sizes match binomial counts", "[fock]") {
  CHECK(FockBasis(20, 4).size() == 4845);
  CHECK(FockBasis(25, 3).size() == 2300);
  CHECK(FockBasis(6, 6).size() == 1);
}

TEST_CASE("invalid particle counts are rejected", "[fock]") {
  CHECK_THROWS_AS(FockBasis(3, 4), DimensionError);
  CHECK_THROWS_AS(FockBasis(3, 0), DimensionError);
  CHECK_THROWS_AS(FockBasis(0, 1), DimensionError);
}

TEST_CASE("rank hits the lexicographic endpoints", "[fock]") {
  const FockBasis basis(3, 2);
  const int first[] = {0, 1};
  const int last[] = {1, 2};
  CHECK(basis.rank({first, 2}) == 0);
  CHECK(basis.rank({last, 2}) == 2);
}

TEST_CASE("rank agrees with a linear scan", "[fock]") {
  const FockBasis basis(6, 3);
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t pick = rng() % basis.size();
    const auto tuple = basis.state(pick);
    // independent path: scan the enumeration for the matching tuple
    std::size_t found = basis.size();
    for (std::size_t k = 0; k < basis.size(); ++k) {
      const auto s = basis.state(k);
      if (std::equal(s.begin(), s.end(), tuple.begin())) {
        found = k;
        break;
      }
    }
    CHECK(basis.rank(tuple) == found);
  }
}

TEST_CASE("rank and unrank are mutually inverse", "[fock]") {
  const FockBasis basis(7, 3);
  for (std::size_t k = 0; k < basis.size(); ++k) {
    REQUIRE(basis.rank(basis.unrank(k)) == k);
  }
}

TEST_CASE("malformed tuples are rejected", "[fock]") {
  const FockBasis basis(5, 2);
  const int repeated[] = {1, 1};
  const int decreasing[] = {3, 2};
  const int out_of_range[] = {3, 5};
  CHECK_THROWS_AS(basis.rank({repeated, 2}), DimensionError);
  CHECK_THROWS_AS(basis.rank({decreasing, 2}), DimensionError);
  CHECK_THROWS_AS(basis.rank({out_of_range, 2}), DimensionError);
}

TEST_CASE("pointwise value vanishes on repeated coordinates", "[fock]") {
  auto f = testing::random_wavefunction(make_fock_basis(4, 2), 11);
  const int args[] = {2, 2};
  CHECK(f.pointwise({args, 2}) == Complex(0.0, 0.0));
}

TEST_CASE("pointwise value flips sign under transpositions", "[fock]") {
  auto f = testing::random_wavefunction(make_fock_basis(5, 3), 12);
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    int args[3] = {static_cast<int>(rng() % 5), static_cast<int>(rng() % 5),
                   static_cast<int>(rng() % 5)};
    int swapped[3] = {args[0], args[1], args[2]};
    const int p = static_cast<int>(rng() % 3);
    const int q = (p + 1 + static_cast<int>(rng() % 2)) % 3;
    std::swap(swapped[p], swapped[q]);
    const Complex a = f.pointwise({args, 3});
    const Complex b = f.pointwise({swapped, 3});
    CHECK(std::abs(a + b) < 1e-14);
  }
}

TEST_CASE("pointwise value on sorted arguments is the stored amplitude over sqrt(N!)",
          "[fock]") {
  auto basis = make_fock_basis(5, 3);
  auto f = testing::random_wavefunction(basis, 14);
  for (std::size_t k = 0; k < basis->size(); ++k) {
    const auto x = basis->state(k);
    const Complex expected = f.amplitudes()(static_cast<Eigen::Index>(k)) / std::sqrt(6.0);
    CHECK(std::abs(f.pointwise(x) - expected) < 1e-15);
  }
}

TEST_CASE("antisymmetric extension is normalized over the full grid", "[fock]") {
  auto f = testing::random_wavefunction(make_fock_basis(4, 2), 15);
  double total = 0.0;
  for (int x = 0; x < 4; ++x) {
    for (int y = 0; y < 4; ++y) {
      const int args[] = {x, y};
      total += std::norm(f.pointwise({args, 2}));
    }
  }
  CHECK(total == Approx(1.0).margin(1e-10));
}

TEST_CASE("out-of-range pointwise arguments are rejected", "[fock]") {
  auto f = testing::random_wavefunction(make_fock_basis(4, 2), 16);
  const int args[] = {0, 4};
  CHECK_THROWS_AS(f.pointwise({args, 2}), DimensionError);
}

TEST_CASE("wave-function dump round-trips bit-exactly", "[fock][io]") {
  namespace fs = std::filesystem;
  auto f = testing::random_wavefunction(make_fock_basis(6, 3), 17);
  const fs::path dir = fs::temp_directory_path() / "sforge_test_io";
  fs::create_directories(dir);
  const fs::path p1 = dir / "state.wf";
  const fs::path p2 = dir / "state2.wf";
  write_wavefunction(p1, f);
  const WaveFunction g = read_wavefunction(p1);
  REQUIRE(g.basis() == f.basis());
  for (Eigen::Index i = 0; i < f.amplitudes().size(); ++i) {
    REQUIRE(g.amplitudes()(i) == f.amplitudes()(i));
  }
  write_wavefunction(p2, g);
  REQUIRE(slurp(p1) == slurp(p2));
  fs::remove_all(dir);
}

TEST_CASE("truncated or corrupt dumps are rejected", "[fock][io]") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "sforge_test_io_bad";
  fs::create_directories(dir);
  const fs::path p = dir / "bad.wf";
  {
    std::ofstream out(p);
    out << "# d=4 n=2 count=6\n0 0,1 0.5 0.0\n";
  }
  CHECK_THROWS_AS(read_wavefunction(p), ConfigError);
  {
    std::ofstream out(p);
    out << "not a header\n";
  }
  CHECK_THROWS_AS(read_wavefunction(p), ConfigError);
  fs::remove_all(dir);
}
