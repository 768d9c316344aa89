// Copyright 2026 The atomic-sdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "atomic_sdp/trig_polynomial.hpp"

namespace atomic_sdp {
namespace {

Eigen::MatrixXcd random_hermitian(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  Eigen::MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) a(i, j) = Complex(normal(rng), normal(rng));
  }
  return a + a.adjoint();
}

TrigPolynomial random_poly(const GridShape& shape, const DegreeVector& degree,
                           std::mt19937_64& rng) {
  std::normal_distribution<double> normal;
  std::vector<Complex> v(shape.size());
  for (auto& c : v) c = Complex(normal(rng), normal(rng));
  return zero_pad(TensorSamples::dense(shape, v), degree);
}

// Every multi-index k with |k_p| <= m_p, first axis fastest.
std::vector<DiagonalIndex> symmetric_box(const DegreeVector& m) {
  std::vector<DiagonalIndex> out;
  DiagonalIndex k(m.size());
  for (std::size_t p = 0; p < m.size(); ++p) k[p] = -m[p];
  while (true) {
    out.push_back(k);
    std::size_t p = 0;
    while (p < m.size() && k[p] == m[p]) {
      k[p] = -m[p];
      ++p;
    }
    if (p == m.size()) break;
    ++k[p];
  }
  return out;
}

TEST(Theta, OneDimensionalShiftPattern) {
  const Eigen::MatrixXd t = theta_1d(1, 3);
  EXPECT_EQ(t.rows(), 4);
  EXPECT_EQ(t.sum(), 3.0);
  EXPECT_EQ(t(0, 1), 1.0);
  EXPECT_EQ(t(2, 3), 1.0);
  EXPECT_EQ(t(1, 0), 0.0);
  EXPECT_EQ(theta_1d(0, 3), Eigen::MatrixXd::Identity(4, 4));
  EXPECT_EQ(theta_1d(-2, 3), theta_1d(2, 3).transpose());
  EXPECT_THROW(theta_1d(4, 3), std::out_of_range);
}

TEST(Theta, KroneckerOnesCountIsProductOfDiagonalLengths) {
  const DegreeVector m{2, 3};
  for (const auto& k : symmetric_box(m)) {
    const Eigen::MatrixXd t = theta_kron(k, m);
    ASSERT_EQ(t.rows(), 12);
    const double expected = (m[0] + 1 - std::abs(k[0])) * (m[1] + 1 - std::abs(k[1]));
    EXPECT_EQ(t.sum(), expected);
  }
}

TEST(DiagonalTrace, MatchesDenseThetaProduct) {
  std::mt19937_64 rng(3);
  const DegreeVector m{2, 1, 2};
  const Eigen::MatrixXcd q = random_hermitian(static_cast<int>(box_size(m)), rng);
  for (const auto& k : symmetric_box(m)) {
    const Complex oracle = (theta_kron(k, m).cast<Complex>() * q).trace();
    EXPECT_NEAR(std::abs(diagonal_trace(q, k, m) - oracle), 0.0, 1e-11);
  }
}

TEST(DiagonalTrace, ConjugateSymmetricForHermitianGram) {
  std::mt19937_64 rng(4);
  const DegreeVector m{3, 2};
  const Eigen::MatrixXcd q = random_hermitian(12, rng);
  for (const auto& k : symmetric_box(m)) {
    DiagonalIndex neg(k);
    for (int& v : neg) v = -v;
    EXPECT_NEAR(std::abs(diagonal_trace(q, neg, m) - std::conj(diagonal_trace(q, k, m))), 0.0,
                1e-12);
  }
}

TEST(DiagonalTrace, RankOneGramGivesAutocorrelation) {
  std::mt19937_64 rng(5);
  const DegreeVector m{3, 2};
  const GridShape box({4, 3});
  std::normal_distribution<double> normal;
  Eigen::VectorXcd v(12);
  for (auto& c : v) c = Complex(normal(rng), normal(rng));
  const Eigen::MatrixXcd q = v * v.adjoint();
  for (const auto& k : symmetric_box(m)) {
    // sum over a of v[a + k] conj(v[a]) with vec positions.
    Complex oracle(0.0, 0.0);
    for (std::size_t o = 0; o < box.size(); ++o) {
      const MultiIndex a = box.unravel(o);
      MultiIndex b{a[0] + k[0], a[1] + k[1]};
      if (!box.contains(b)) continue;
      oracle += v(static_cast<Eigen::Index>(vec_index(b, m) - 1)) *
                std::conj(v(static_cast<Eigen::Index>(vec_index(a, m) - 1)));
    }
    EXPECT_NEAR(std::abs(diagonal_trace(q, k, m) - oracle), 0.0, 1e-11);
  }
}

TEST(Halfspace, OneDimensional) {
  const DegreeVector m{3};
  EXPECT_EQ(halfspace(m), (std::vector<DiagonalIndex>{{0}, {1}, {2}, {3}}));
}

TEST(Halfspace, TwoDimensionalUnitBox) {
  const DegreeVector m{1, 1};
  const auto h = halfspace(m);
  EXPECT_EQ(h.size(), 5u);
  EXPECT_EQ(h.front(), (DiagonalIndex{0, 0}));
}

TEST(Halfspace, HoldsExactlyOneOfEachAntipodalPair) {
  for (const DegreeVector& m : {DegreeVector{2, 1, 2}, DegreeVector{11, 11}, DegreeVector{0, 3}}) {
    const auto h = halfspace(m);
    std::set<DiagonalIndex> members(h.begin(), h.end());
    ASSERT_EQ(members.size(), h.size());
    std::size_t box = 1;
    for (int v : m) box *= static_cast<std::size_t>(2 * v + 1);
    EXPECT_EQ(h.size(), (box + 1) / 2);
    for (const auto& k : symmetric_box(m)) {
      DiagonalIndex neg(k);
      for (int& v : neg) v = -v;
      if (k == neg) {
        EXPECT_TRUE(members.contains(k));
      } else {
        EXPECT_NE(members.contains(k), members.contains(neg));
      }
    }
  }
}

TEST(TrigPolynomial, RejectsSupportOutsideGrid) {
  const GridShape shape({2});
  EXPECT_THROW(TrigPolynomial(shape, {0}, {Complex(1.0)}), std::invalid_argument);
  EXPECT_THROW(TrigPolynomial(shape, {2}, {Complex(1.0), Complex(0.0), Complex(1.0)}),
               std::invalid_argument);
  const TrigPolynomial ok(shape, {2}, {Complex(1.0), Complex(2.0), Complex(0.0)});
  EXPECT_EQ(ok.on_grid().values()[1], Complex(2.0));
}

TEST(EvalDualPoly, MatchesDirectSum) {
  std::mt19937_64 rng(6);
  const GridShape shape({3, 4});
  const TrigPolynomial q = random_poly(shape, {5, 4}, rng);
  const std::vector<double> f{0.31, 0.77};
  Complex oracle(0.0, 0.0);
  const TensorSamples dense = q.on_grid();
  for (std::size_t o = 0; o < shape.size(); ++o) {
    const MultiIndex j = shape.unravel(o);
    oracle += dense.values()[o] * std::polar(1.0, -kTwoPi * (f[0] * j[0] + f[1] * j[1]));
  }
  EXPECT_NEAR(std::abs(eval_dual_poly(q, f) - oracle), 0.0, 1e-12);
}

TEST(SquaredModulusDerivatives, MatchFiniteDifferences) {
  std::mt19937_64 rng(7);
  const GridShape shape({4, 3});
  const TrigPolynomial q = random_poly(shape, {3, 2}, rng);
  const std::vector<double> f{0.23, 0.61};
  const ModulusDerivatives g = squared_modulus_derivatives(q, f);
  EXPECT_NEAR(g.value, std::norm(eval_dual_poly(q, f)), 1e-11);
  const double h = 1e-5;
  for (int p = 0; p < 2; ++p) {
    std::vector<double> up(f), down(f);
    up[p] += h;
    down[p] -= h;
    const ModulusDerivatives gu = squared_modulus_derivatives(q, up);
    const ModulusDerivatives gd = squared_modulus_derivatives(q, down);
    const double fd = (gu.value - gd.value) / (2 * h);
    EXPECT_NEAR(g.gradient(p), fd, 1e-5 * std::max(1.0, std::abs(fd)));
    for (int r = 0; r < 2; ++r) {
      const double fd2 = (gu.gradient(r) - gd.gradient(r)) / (2 * h);
      EXPECT_NEAR(g.hessian(r, p), fd2, 1e-4 * std::max(1.0, std::abs(fd2)));
    }
  }
}

TEST(GridModulus, AgreesWithPointEvaluation) {
  std::mt19937_64 rng(8);
  const GridShape shape({3, 2});
  const TrigPolynomial q = random_poly(shape, {2, 1}, rng);
  const std::vector<int> density{7, 5};
  const ModulusGrid grid = grid_modulus(q, density);
  ASSERT_EQ(grid.modulus.size(), 35u);
  for (std::size_t o = 0; o < grid.modulus.size(); ++o) {
    EXPECT_NEAR(grid.modulus[o], std::abs(eval_dual_poly(q, grid.point(o))), 1e-12);
  }
  EXPECT_EQ(grid.point(1), (Frequency{1.0 / 7.0, 0.0}));
  EXPECT_DOUBLE_EQ(grid.max(), *std::max_element(grid.modulus.begin(), grid.modulus.end()));
}

TEST(GridModulus, DefaultDensityCoversModulusSquaredBandwidth) {
  EXPECT_EQ(default_grid_density(std::vector<int>{11, 40}), (std::vector<int>{64, 82}));
}

TEST(WriteModulusCsv, HeaderAndRowCount) {
  const GridShape shape({2, 2});
  const TrigPolynomial zero = zero_pad(TensorSamples::dense(shape, std::vector<Complex>(4)), {1, 1});
  std::ostringstream out;
  write_modulus_csv(out, grid_modulus(zero, std::vector<int>{6, 6}));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "f_1,f_2,modulus");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
  }
  EXPECT_EQ(rows, 36);
}

}  // namespace
}  // namespace atomic_sdp
