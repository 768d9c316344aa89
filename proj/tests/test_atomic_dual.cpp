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

#include <cmath>

#include <gtest/gtest.h>

#include "atomic_sdp/atomic_dual.hpp"

namespace atomic_sdp {
namespace {

TensorSamples observe(const SpectralSignal& s, const GridShape& shape, const SampleMask& mask) {
  return restrict_to(synthesize(s, shape), mask);
}

TEST(BuildDualSdp, ProblemSizesForTwelveByTwelve) {
  const GridShape shape({12, 12});
  const Instance inst = random_instance(shape, 8, 60, 1.5 / 12, AmplitudeLaw::kHalfPlusChiSq1, 1);
  const DualSdp sdp = build_dual_sdp(observe(inst.signal, shape, inst.mask), {11, 11});
  EXPECT_EQ(sdp.gram_order, 144u);
  EXPECT_EQ(sdp.halfspace_size, 265u);
  EXPECT_EQ(sdp.trace_constraints, 529u);
  EXPECT_EQ(sdp.problem.num_equalities(), 529);
  EXPECT_EQ(sdp.gram_offset, 120);
  EXPECT_EQ(sdp.problem.num_variables(), 120 + 144 * 144);
  ASSERT_EQ(sdp.problem.blocks.size(), 1u);
  EXPECT_EQ(sdp.problem.blocks[0].order, 145);
  EXPECT_EQ(sdp.problem.blocks[0].field, BlockField::kComplex);
  EXPECT_NO_THROW(sdp.problem.validate());
}

TEST(BuildDualSdp, RejectsBadInput) {
  const GridShape shape({4});
  const SpectralSignal s(1, {{{0.2}, {1.0, 0.0}}});
  EXPECT_THROW(build_dual_sdp(synthesize(s, shape), {3}), std::invalid_argument);
  const SampleMask mask(shape, {{0}, {2}});
  EXPECT_THROW(build_dual_sdp(observe(s, shape, mask), {2}), std::invalid_argument);
  EXPECT_THROW(build_dual_sdp(observe(s, shape, mask), {3, 3}), std::invalid_argument);
}

TEST(SolveRestrictedDual, SingleAtomValueIsItsAmplitude) {
  const GridShape shape({8});
  const Complex c(1.2, -0.5);
  const SpectralSignal s(1, {{{0.3141}, c}});
  const SampleMask mask(shape, {{0}, {1}, {3}, {4}, {6}});
  const RestrictedDualResult r = solve_restricted_dual(observe(s, shape, mask), {7});
  EXPECT_EQ(r.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.p_m_dual, std::abs(c), 1e-5);
  EXPECT_NEAR(std::abs(eval_dual_poly(r.q_star, std::vector<double>{0.3141})), 1.0, 1e-4);
}

TEST(SolveRestrictedDual, DualVariableVanishesOffTheMask) {
  const GridShape shape({5, 4});
  const Instance inst = random_instance(shape, 2, 9, 0.2, AmplitudeLaw::kUnit, 3);
  const RestrictedDualResult r =
      solve_restricted_dual(observe(inst.signal, shape, inst.mask), {4, 3});
  const TensorSamples q = r.q_star.on_grid();
  for (std::size_t o = 0; o < shape.size(); ++o) {
    if (!inst.mask.find(o)) EXPECT_EQ(q.values()[o], Complex(0.0, 0.0));
  }
  // Weak duality through the restricted set.
  EXPECT_LE(r.p_m_dual, inst.signal.amplitude_sum() + 1e-6);
  EXPECT_LE(grid_modulus(r.q_star, default_grid_density(r.degree)).max(), 1.0 + 1e-4);
}

TEST(SolveRestrictedDual, ZeroDataGivesZeroPolynomial) {
  const GridShape shape({3, 3});
  const SampleMask mask(shape, {{0, 0}, {1, 2}});
  const TensorSamples zero = TensorSamples::sparse(mask, std::vector<Complex>(2));
  const RestrictedDualResult r = solve_restricted_dual(zero, {2, 2});
  EXPECT_EQ(r.p_m_dual, 0.0);
  for (const auto& c : r.q_star.coeffs()) EXPECT_EQ(c, Complex(0.0, 0.0));
}

TEST(Primal1d, SingleAtomValueIsItsAmplitude) {
  const GridShape shape({6});
  const Complex c(-0.7, 0.9);
  const SpectralSignal s(1, {{{0.81}, c}});
  const Primal1dResult r = solve_primal_1d(observe(s, shape, SampleMask::full(shape)));
  EXPECT_EQ(r.solution.status, SolveStatus::kOptimal);
  EXPECT_NEAR(r.value, std::abs(c), 1e-5);
  ASSERT_EQ(r.completed.size(), 6u);
  const TensorSamples x = synthesize(s, shape);
  for (std::size_t l = 0; l < 6; ++l) EXPECT_NEAR(std::abs(r.completed[l] - x.values()[l]), 0.0, 1e-4);
}

TEST(Primal1d, RejectsMultidimensionalGrid) {
  const GridShape shape({2, 2});
  const TensorSamples x = TensorSamples::sparse(SampleMask::full(shape), std::vector<Complex>(4));
  EXPECT_THROW(build_primal_1d_sdp(x), std::invalid_argument);
}

TEST(Primal1d, CompletionMatchesObservations) {
  const GridShape shape({8});
  const Instance inst = random_instance(shape, 2, 6, 0.125, AmplitudeLaw::kHalfPlusChiSq1, 11);
  const TensorSamples x = observe(inst.signal, shape, inst.mask);
  const Primal1dResult r = solve_primal_1d(x);
  for (std::size_t i = 0; i < inst.mask.size(); ++i) {
    const std::size_t l = inst.mask.offsets()[i];
    EXPECT_NEAR(std::abs(r.completed[l] - x.values()[i]), 0.0, 1e-6);
  }
}

TEST(EscalateDegree, SingleAtomCertifiesAtMinimalDegree) {
  const GridShape shape({6, 5});
  const SpectralSignal s(2, {{{0.42, 0.07}, {0.0, 2.0}}});
  const Instance inst = random_instance(shape, 1, 10, 0.0, AmplitudeLaw::kUnit, 5);
  const EscalationResult r = escalate_degree(observe(s, shape, inst.mask));
  ASSERT_TRUE(r.certificate.certified());
  EXPECT_EQ(r.certificate.degree, (DegreeVector{5, 4}));
  ASSERT_EQ(r.certificate.history.size(), 1u);
  ASSERT_EQ(r.certificate.frequencies.size(), 1u);
  EXPECT_LE(wrap_distance(r.certificate.frequencies[0], s.poles()[0].freq), 1e-6);
}

TEST(EscalateDegree, StopsAtCapAndRecordsHistory) {
  const GridShape shape({4});
  const SpectralSignal s(1, {{{0.1}, {1.0, 0.0}}, {{0.16}, {1.0, 0.0}}});
  const SampleMask mask(shape, {{0}, {3}});
  DegreeSchedule schedule{{3}, {1}, {5}};
  CertifyTolerances strict;
  strict.fit = 1e-300;
  const EscalationResult r =
      escalate_degree(observe(s, shape, mask), schedule, pipeline_solver_settings(), {}, strict);
  EXPECT_FALSE(r.certificate.certified());
  ASSERT_EQ(r.certificate.history.size(), 3u);
  EXPECT_EQ(r.certificate.history[0].degree, DegreeVector{3});
  EXPECT_EQ(r.certificate.history[2].degree, DegreeVector{5});
  for (const auto& step : r.certificate.history) {
    EXPECT_LE(step.p_m_dual, step.p_primal_f + 1e-6 * (1 + step.p_primal_f));
  }
}

TEST(EscalateDegree, ZeroObservationsCertifyEmptyModel) {
  const GridShape shape({3});
  const SampleMask mask(shape, {{0}, {2}});
  const EscalationResult r = escalate_degree(TensorSamples::sparse(mask, std::vector<Complex>(2)));
  EXPECT_TRUE(r.certificate.certified());
  EXPECT_TRUE(r.certificate.frequencies.empty());
  EXPECT_EQ(r.certificate.p_primal_f, 0.0);
}

TEST(EscalateDegree, ValidatesSchedule) {
  const GridShape shape({3});
  const SampleMask mask(shape, {{0}, {2}});
  const TensorSamples x = TensorSamples::sparse(mask, {{1.0, 0.0}, {0.0, 1.0}});
  EXPECT_THROW(escalate_degree(x, {{4}, {1}, {3}}), std::invalid_argument);
  EXPECT_THROW(escalate_degree(x, {{2, 2}, {}, {}}), std::invalid_argument);
}

}  // namespace
}  // namespace atomic_sdp
