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
#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "atomic_sdp/localize_recover.hpp"

namespace atomic_sdp {
namespace {

// P(f) = sum_j w_k exp(i 2 pi (g_k - f) j) / |N|, peaking near each g_k.
TrigPolynomial steering_poly(const GridShape& shape, const std::vector<Frequency>& g,
                             const std::vector<double>& w) {
  std::vector<Complex> v(shape.size());
  for (std::size_t o = 0; o < shape.size(); ++o) {
    const MultiIndex j = shape.unravel(o);
    for (std::size_t k = 0; k < g.size(); ++k) {
      double phase = 0.0;
      for (std::size_t p = 0; p < j.size(); ++p) phase += g[k][p] * j[p];
      v[o] += w[k] * std::polar(1.0, kTwoPi * phase) / static_cast<double>(shape.size());
    }
  }
  return zero_pad(TensorSamples::dense(shape, v), minimal_degree(shape));
}

TEST(LocatePeaks, FindsOffGridMaximumOfSteeringPolynomial) {
  const GridShape shape({9, 7});
  const Frequency g{0.40321, 0.91177};
  const TrigPolynomial q = steering_poly(shape, {g}, {1.0});
  const std::vector<Peak> peaks = locate_peaks(q);
  ASSERT_EQ(peaks.size(), 1u);
  EXPECT_TRUE(peaks[0].refined);
  EXPECT_NEAR(peaks[0].modulus, 1.0, 1e-12);
  EXPECT_LE(wrap_distance(peaks[0].freq, g), 1e-9);
}

TEST(LocatePeaks, RefinementNeverLowersModulusAndOutputIsSorted) {
  const GridShape shape({16});
  const std::vector<Frequency> g{{0.73}, {0.21}, {0.995}};
  const TrigPolynomial q = steering_poly(shape, g, {1.0, 1.0, 1.0});
  LocalizeOptions options;
  options.peak_threshold = 0.9;
  const std::vector<Peak> peaks = locate_peaks(q, options);
  ASSERT_EQ(peaks.size(), 3u);
  EXPECT_TRUE(std::is_sorted(peaks.begin(), peaks.end(),
                             [](const Peak& a, const Peak& b) { return a.freq < b.freq; }));
  const ModulusGrid grid = grid_modulus(q, default_grid_density(q.degree()));
  for (const auto& peak : peaks) {
    EXPECT_GE(peak.modulus, options.peak_threshold);
    // The seeding grid point is the nearest one; refinement must not lose to it.
    const int n = grid.density[0];
    const auto seed = static_cast<std::size_t>(std::lround(peak.freq[0] * n)) % n;
    EXPECT_GE(peak.modulus + 1e-15, grid.modulus[seed]);
  }
}

TEST(LocatePeaks, ZeroPolynomialHasNoPeaks) {
  const GridShape shape({4, 4});
  const TrigPolynomial q = zero_pad(TensorSamples::dense(shape, std::vector<Complex>(16)), {3, 3});
  EXPECT_TRUE(locate_peaks(q).empty());
}

TEST(RecoverCoeffs, SingleAtomExactFrequency) {
  const GridShape shape({5, 4});
  const Complex c(0.3, -2.2);
  const SpectralSignal s(2, {{{0.17, 0.63}, c}});
  const TensorSamples x = restrict_to(synthesize(s, shape), SampleMask::full(shape));
  const CoefficientFit fit = recover_coeffs({{0.17, 0.63}}, x);
  ASSERT_EQ(fit.coeffs.size(), 1u);
  EXPECT_NEAR(std::abs(fit.coeffs[0] - c), 0.0, 1e-10);
  EXPECT_NEAR(fit.residual_norm, 0.0, 1e-12);
  EXPECT_NEAR(fit.condition_number, 1.0, 1e-12);
}

TEST(RecoverCoeffs, DenseInputTreatedAsFullMask) {
  const GridShape shape({6});
  const SpectralSignal s(1, {{{0.5}, {1.0, 1.0}}});
  const CoefficientFit fit = recover_coeffs({{0.5}}, synthesize(s, shape));
  EXPECT_NEAR(std::abs(fit.coeffs[0] - Complex(1.0, 1.0)), 0.0, 1e-12);
}

TEST(RecoverCoeffs, WrongPoleLeavesResidual) {
  const GridShape shape({8});
  const SpectralSignal s(1, {{{0.3}, {1.0, 0.0}}});
  const TensorSamples x = restrict_to(synthesize(s, shape), SampleMask::full(shape));
  const CoefficientFit fit = recover_coeffs({{0.4}}, x);
  EXPECT_GT(fit.residual_norm, 0.1);
}

TEST(RecoverCoeffs, CoincidentFrequenciesAreRankDeficient) {
  const GridShape shape({8});
  const SpectralSignal s(1, {{{0.3}, {1.0, 0.0}}});
  const TensorSamples x = restrict_to(synthesize(s, shape), SampleMask::full(shape));
  try {
    recover_coeffs({{0.1}, {0.3}, {0.3}}, x);
    FAIL() << "expected RankDeficientError";
  } catch (const RankDeficientError& e) {
    EXPECT_EQ(e.offending_pair(), std::make_pair(std::size_t{1}, std::size_t{2}));
  }
  EXPECT_THROW(recover_coeffs({}, x), std::invalid_argument);
}

TEST(MisfitAtomicBound, OnGridAtomCostsItsAmplitude) {
  const GridShape shape({6, 4});
  const Complex c(0.0, -3.0);
  const SpectralSignal s(2, {{{2.0 / 6.0, 0.25}, c}});
  const SampleMask full = SampleMask::full(shape);
  const TensorSamples x = restrict_to(synthesize(s, shape), full);
  EXPECT_NEAR(misfit_atomic_bound(x.values(), full), std::abs(c), 1e-12);
  EXPECT_EQ(misfit_atomic_bound(std::vector<Complex>(shape.size()), full), 0.0);
}

TEST(MisfitAtomicBound, DominatesLargestEntry) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> normal;
  const GridShape shape({5, 5});
  const SampleMask mask(shape, {{0, 0}, {1, 3}, {4, 4}, {2, 1}});
  std::vector<Complex> r(mask.size());
  double largest = 0.0;
  for (auto& v : r) {
    v = Complex(normal(rng), normal(rng));
    largest = std::max(largest, std::abs(v));
  }
  // Each atom has unit-modulus entries, so any representation costs at least max |r_l|.
  EXPECT_GE(misfit_atomic_bound(r, mask), largest - 1e-12);
}

TEST(Certify, FullModelCertifies) {
  const GridShape shape({8});
  const SpectralSignal s(1, {{{0.11}, {1.0, 0.0}}, {{0.61}, {0.0, 2.0}}});
  const SampleMask mask(shape, {{0}, {1}, {2}, {4}, {5}, {7}});
  const TensorSamples x = restrict_to(synthesize(s, shape), mask);
  const std::vector<Frequency> freqs{{0.11}, {0.61}};
  const Certificate cert = certify(3.0 - 1e-7, freqs, recover_coeffs(freqs, x), x);
  EXPECT_TRUE(cert.certified());
  EXPECT_NEAR(cert.p_primal_f, 3.0, 1e-10);
  EXPECT_NEAR(cert.gap, 1e-7, 1e-9);
  EXPECT_STREQ(to_string(cert.verdict), "certified");
}

TEST(Certify, TruncatedPeakListIsUncertified) {
  const GridShape shape({8});
  const SpectralSignal s(1, {{{0.11}, {1.0, 0.0}}, {{0.61}, {0.0, 2.0}}});
  const SampleMask mask(shape, {{0}, {1}, {2}, {4}, {5}, {7}});
  const TensorSamples x = restrict_to(synthesize(s, shape), mask);
  const std::vector<Frequency> freqs{{0.61}};
  const Certificate cert = certify(3.0, freqs, recover_coeffs(freqs, x), x);
  EXPECT_FALSE(cert.certified());
  EXPECT_GT(cert.residual, 0.1);
  EXPECT_GE(cert.gap, -1e-3 * 3.0);
}

TEST(Certify, DualAbovePrimalRaisesConsistencyError) {
  const GridShape shape({4});
  const SpectralSignal s(1, {{{0.25}, {1.0, 0.0}}});
  const TensorSamples x = restrict_to(synthesize(s, shape), SampleMask::full(shape));
  const std::vector<Frequency> freqs{{0.25}};
  EXPECT_THROW(certify(1.5, freqs, recover_coeffs(freqs, x), x), ConsistencyError);
}

}  // namespace
}  // namespace atomic_sdp
