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

// Semidefinite programs for atomic norm minimization.
//
// The degree-m restricted dual, for observations x on the index set M:
//
//   maximize    Re <q_M, x_M>
//   subject to  tr[Theta_k Q0] = delta_k          for k in the halfspace H
//               [[Q0, vec(q~)], [vec(q~)^*, 1]]  PSD
//
// with q supported on M and q~ its zero extension to the box prod {0..m_p}.
// Any feasible q has sup_f |<q, a(f,0)>| <= 1, so the optimal value is a
// lower bound on the minimum atomic norm that becomes tight once m is large
// enough. For d = 1 the Toeplitz primal provides an independent route to
// the same value.

#ifndef ATOMIC_SDP_ATOMIC_DUAL_HPP
#define ATOMIC_SDP_ATOMIC_DUAL_HPP

#include <cstddef>
#include <vector>

#include "atomic_sdp/conic.hpp"
#include "atomic_sdp/localize_recover.hpp"
#include "atomic_sdp/tensor_signal.hpp"
#include "atomic_sdp/trig_polynomial.hpp"

namespace atomic_sdp {

struct DualSdp {
  ConicProblem problem;
  DegreeVector degree;
  std::size_t gram_order = 0;         // prod (m_p + 1)
  std::size_t halfspace_size = 0;     // |H|
  std::size_t trace_constraints = 0;  // 2 |H| - 1
  Eigen::Index q_offset = 0;          // 2 reals per observed entry
  Eigen::Index gram_offset = 0;       // Hermitian svec of Q0
};

/// `x_obs` must be a sparse tensor over the observation mask.
DualSdp build_dual_sdp(const TensorSamples& x_obs, const DegreeVector& degree);

struct RestrictedDualResult {
  TrigPolynomial q_star;
  double p_m_dual = 0.0;
  DegreeVector degree;
  SolveStatus status = SolveStatus::kMaxIterations;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double solver_gap = 0.0;
  double seconds = 0.0;
};

RestrictedDualResult solve_restricted_dual(const TensorSamples& x_obs, const DegreeVector& degree,
                                           const SolverSettings& settings = {});

/// Toeplitz SDP for d = 1:
///   minimize (1/(2n)) tr(T) + t/2  s.t. [[T, xhat], [xhat^*, t]] PSD,
///   xhat = x on M, T Hermitian Toeplitz.
ConicProblem build_primal_1d_sdp(const TensorSamples& x_obs);

struct Primal1dResult {
  double value = 0.0;
  std::vector<Complex> completed;  // xhat over the full grid
  ConicSolution solution;
};

Primal1dResult solve_primal_1d(const TensorSamples& x_obs, const SolverSettings& settings = {});

struct DegreeSchedule {
  DegreeVector start;      // empty: n_p - 1
  DegreeVector increment;  // empty: +1 per axis
  DegreeVector cap;        // empty: 2 n_p
};

/// Solver settings used by the end-to-end pipeline. The fit tolerance of the
/// certificate needs poles accurate to about 1e-8, which in turn needs a
/// tighter stopping rule than the generic solver defaults.
SolverSettings pipeline_solver_settings();

struct EscalationResult {
  RestrictedDualResult dual;
  std::vector<Peak> peaks;
  Certificate certificate;
};

/// Solves, localizes, recovers and certifies at increasing degrees until the
/// weak-duality gap closes or the cap is reached. The certificate carries
/// the history of every degree tried.
EscalationResult escalate_degree(const TensorSamples& x_obs, const DegreeSchedule& schedule = {},
                                 const SolverSettings& settings = pipeline_solver_settings(),
                                 const LocalizeOptions& localize = {},
                                 const CertifyTolerances& tolerances = {});

}  // namespace atomic_sdp

#endif  // ATOMIC_SDP_ATOMIC_DUAL_HPP
