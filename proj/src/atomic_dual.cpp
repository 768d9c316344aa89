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

#include "atomic_sdp/atomic_dual.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace atomic_sdp {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880168872420969808;
constexpr double kInvSqrt2 = 1.0 / kSqrt2;

using Triplets = std::vector<Eigen::Triplet<double>>;

void check_observations(const TensorSamples& x_obs) {
  if (x_obs.is_dense()) {
    throw std::invalid_argument("observations must be a sparse tensor over the sample mask");
  }
  if (x_obs.mask().empty()) throw std::invalid_argument("observation mask is empty");
}

SparseMatrix from_triplets(Eigen::Index rows, Eigen::Index cols, const Triplets& triplets) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(triplets.begin(), triplets.end());
  m.makeCompressed();
  return m;
}

}  // namespace

DualSdp build_dual_sdp(const TensorSamples& x_obs, const DegreeVector& degree) {
  check_observations(x_obs);
  const GridShape& shape = x_obs.shape();
  if (static_cast<int>(degree.size()) != shape.dimension()) {
    throw std::invalid_argument("build_dual_sdp: degree and grid dimensions differ");
  }
  for (int p = 0; p < shape.dimension(); ++p) {
    if (degree[static_cast<std::size_t>(p)] < shape.extent(p) - 1) {
      throw std::invalid_argument("build_dual_sdp: degree below n_p - 1");
    }
  }

  const SampleMask& mask = x_obs.mask();
  const auto observed = static_cast<Eigen::Index>(mask.size());
  const auto gram = static_cast<int>(box_size(degree));
  const Eigen::Index gram_params = static_cast<Eigen::Index>(gram) * gram;

  DualSdp out;
  out.degree = degree;
  out.gram_order = static_cast<std::size_t>(gram);
  out.q_offset = 0;
  out.gram_offset = 2 * observed;
  const Eigen::Index n = out.gram_offset + gram_params;

  ConicProblem& problem = out.problem;
  problem.layout = {{"q", out.q_offset, 2 * observed}, {"gram", out.gram_offset, gram_params}};

  // Objective: minimize -Re <q_M, x_M>.
  problem.objective = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < observed; ++i) {
    const Complex x = x_obs.values()[static_cast<std::size_t>(i)];
    problem.objective(out.q_offset + 2 * i) = -x.real();
    problem.objective(out.q_offset + 2 * i + 1) = -x.imag();
  }

  // tr[Theta_k Q0] = sum_a Q0(a + k, a), split into real and imaginary rows.
  const std::vector<DiagonalIndex> half = halfspace(degree);
  out.halfspace_size = half.size();
  Triplets eq;
  std::vector<double> rhs;
  MultiIndex shifted(degree.size());
  for (const auto& k : half) {
    const bool is_zero = std::all_of(k.begin(), k.end(), [](int v) { return v == 0; });
    const int re_row = static_cast<int>(rhs.size());
    rhs.push_back(is_zero ? 1.0 : 0.0);
    const int im_row = is_zero ? -1 : static_cast<int>(rhs.size());
    if (!is_zero) rhs.push_back(0.0);

    for (std::size_t u = 1; u <= static_cast<std::size_t>(gram); ++u) {
      const MultiIndex a = unvec_index(u, degree);
      bool inside = true;
      for (std::size_t p = 0; p < degree.size(); ++p) {
        shifted[p] = a[p] + k[p];
        inside = inside && shifted[p] >= 0 && shifted[p] <= degree[p];
      }
      if (!inside) continue;
      const int row = static_cast<int>(vec_index(shifted, degree) - 1);
      const int col = static_cast<int>(u - 1);
      const auto base = static_cast<int>(out.gram_offset);
      if (row == col) {
        eq.emplace_back(re_row, base + static_cast<int>(complex_svec_offset(row, col)), 1.0);
        continue;
      }
      // Q0(row, col) in terms of the packed upper-triangle entry.
      const int param = base + static_cast<int>(complex_svec_offset(row, col));
      const double imag_sign = row < col ? 1.0 : -1.0;
      eq.emplace_back(re_row, param, kInvSqrt2);
      eq.emplace_back(im_row, param + 1, imag_sign * kInvSqrt2);
    }
  }
  out.trace_constraints = rhs.size();
  problem.eq_matrix = from_triplets(static_cast<Eigen::Index>(rhs.size()), n, eq);
  problem.eq_rhs = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

  // Bordered block [[Q0, q~], [q~^*, 1]]: Q0 is the svec prefix, the border
  // is the last column.
  const PsdBlock block{gram + 1, BlockField::kComplex};
  problem.blocks = {block};
  Triplets cone;
  for (Eigen::Index i = 0; i < gram_params; ++i) {
    cone.emplace_back(static_cast<int>(i), static_cast<int>(out.gram_offset + i), 1.0);
  }
  for (Eigen::Index i = 0; i < observed; ++i) {
    const auto slot = static_cast<int>(vec_index(mask.indices()[static_cast<std::size_t>(i)], degree) - 1);
    const auto packed = static_cast<int>(complex_svec_offset(slot, gram));
    cone.emplace_back(packed, static_cast<int>(out.q_offset + 2 * i), kSqrt2);
    cone.emplace_back(packed + 1, static_cast<int>(out.q_offset + 2 * i + 1), kSqrt2);
  }
  problem.cone_matrix = from_triplets(block.svec_size(), n, cone);
  problem.cone_offset = Eigen::VectorXd::Zero(block.svec_size());
  problem.cone_offset(complex_svec_offset(gram, gram)) = 1.0;
  problem.validate();
  return out;
}

RestrictedDualResult solve_restricted_dual(const TensorSamples& x_obs, const DegreeVector& degree,
                                           const SolverSettings& settings) {
  const auto started = std::chrono::steady_clock::now();
  const DualSdp sdp = build_dual_sdp(x_obs, degree);
  if (x_obs.norm() == 0.0) {
    // Every feasible q is optimal for zero data; q = 0 is the canonical one.
    RestrictedDualResult out;
    out.q_star = zero_pad(TensorSamples::sparse(x_obs.mask(),
                                                std::vector<Complex>(x_obs.mask().size())),
                          degree);
    out.degree = degree;
    out.status = SolveStatus::kOptimal;
    return out;
  }
  const ConicSolution solution = solve(sdp.problem, settings);

  std::vector<Complex> q(x_obs.mask().size());
  for (std::size_t i = 0; i < q.size(); ++i) {
    const Eigen::Index at = sdp.q_offset + 2 * static_cast<Eigen::Index>(i);
    q[i] = Complex(solution.x(at), solution.x(at + 1));
  }

  RestrictedDualResult out;
  out.q_star = zero_pad(TensorSamples::sparse(x_obs.mask(), std::move(q)), degree);
  out.p_m_dual = -solution.objective;
  out.degree = degree;
  out.status = solution.status;
  out.iterations = solution.iterations;
  out.primal_residual = solution.primal_residual;
  out.dual_residual = solution.dual_residual;
  out.solver_gap = solution.gap;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return out;
}

ConicProblem build_primal_1d_sdp(const TensorSamples& x_obs) {
  check_observations(x_obs);
  if (x_obs.shape().dimension() != 1) {
    throw std::invalid_argument("build_primal_1d_sdp: requires a one-dimensional grid");
  }
  const int len = x_obs.shape().extent(0);
  const SampleMask& mask = x_obs.mask();

  // Variables: u_0 | (Re u_k, Im u_k), k = 1..n-1 | (Re xhat_l, Im xhat_l) | t
  const Eigen::Index toeplitz_len = 2 * len - 1;
  const Eigen::Index xhat_offset = toeplitz_len;
  const Eigen::Index t_index = xhat_offset + 2 * len;
  const Eigen::Index n = t_index + 1;

  ConicProblem problem;
  problem.layout = {{"toeplitz", 0, toeplitz_len}, {"xhat", xhat_offset, 2 * len}, {"t", t_index, 1}};
  problem.objective = Eigen::VectorXd::Zero(n);
  problem.objective(0) = 0.5;  // tr(T) / (2n) with tr(T) = n u_0
  problem.objective(t_index) = 0.5;

  Triplets eq;
  std::vector<double> rhs;
  for (std::size_t i = 0; i < mask.size(); ++i) {
    const int l = mask.indices()[i][0];
    const Complex x = x_obs.values()[i];
    eq.emplace_back(static_cast<int>(rhs.size()), static_cast<int>(xhat_offset + 2 * l), 1.0);
    rhs.push_back(x.real());
    eq.emplace_back(static_cast<int>(rhs.size()), static_cast<int>(xhat_offset + 2 * l + 1), 1.0);
    rhs.push_back(x.imag());
  }
  problem.eq_matrix = from_triplets(static_cast<Eigen::Index>(rhs.size()), n, eq);
  problem.eq_rhs = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(rhs.size()));

  const PsdBlock block{len + 1, BlockField::kComplex};
  problem.blocks = {block};
  Triplets cone;
  for (int j = 0; j < len; ++j) {
    for (int i = 0; i <= j; ++i) {
      const auto packed = static_cast<int>(complex_svec_offset(i, j));
      const int lag = j - i;
      if (lag == 0) {
        cone.emplace_back(packed, 0, 1.0);
      } else {
        cone.emplace_back(packed, 2 * lag - 1, kSqrt2);
        cone.emplace_back(packed + 1, 2 * lag, kSqrt2);
      }
    }
  }
  for (int i = 0; i < len; ++i) {
    const auto packed = static_cast<int>(complex_svec_offset(i, len));
    cone.emplace_back(packed, static_cast<int>(xhat_offset + 2 * i), kSqrt2);
    cone.emplace_back(packed + 1, static_cast<int>(xhat_offset + 2 * i + 1), kSqrt2);
  }
  cone.emplace_back(static_cast<int>(complex_svec_offset(len, len)), static_cast<int>(t_index), 1.0);
  problem.cone_matrix = from_triplets(block.svec_size(), n, cone);
  problem.cone_offset = Eigen::VectorXd::Zero(block.svec_size());
  problem.validate();
  return problem;
}

Primal1dResult solve_primal_1d(const TensorSamples& x_obs, const SolverSettings& settings) {
  const ConicProblem problem = build_primal_1d_sdp(x_obs);
  Primal1dResult out;
  out.solution = solve(problem, settings);
  out.value = out.solution.objective;
  const int len = x_obs.shape().extent(0);
  const Eigen::Index xhat_offset = 2 * len - 1;
  for (int l = 0; l < len; ++l) {
    out.completed.emplace_back(out.solution.x(xhat_offset + 2 * l), out.solution.x(xhat_offset + 2 * l + 1));
  }
  return out;
}

SolverSettings pipeline_solver_settings() {
  SolverSettings settings;
  settings.abs_tol = 1e-10;
  settings.rel_tol = 1e-9;
  return settings;
}

EscalationResult escalate_degree(const TensorSamples& x_obs, const DegreeSchedule& schedule,
                                 const SolverSettings& settings, const LocalizeOptions& localize,
                                 const CertifyTolerances& tolerances) {
  check_observations(x_obs);
  const GridShape& shape = x_obs.shape();
  const auto d = static_cast<std::size_t>(shape.dimension());
  DegreeVector degree = schedule.start.empty() ? minimal_degree(shape) : schedule.start;
  DegreeVector increment = schedule.increment.empty() ? DegreeVector(d, 1) : schedule.increment;
  DegreeVector cap = schedule.cap;
  if (cap.empty()) {
    for (int n : shape.dims()) cap.push_back(2 * n);
  }
  if (degree.size() != d || increment.size() != d || cap.size() != d) {
    throw std::invalid_argument("escalate_degree: schedule dimension mismatch");
  }
  for (std::size_t p = 0; p < d; ++p) {
    if (increment[p] < 0) throw std::invalid_argument("escalate_degree: negative increment");
    if (cap[p] < degree[p]) throw std::invalid_argument("escalate_degree: cap below start degree");
  }

  std::vector<EscalationStep> history;
  while (true) {
    EscalationResult result;
    result.dual = solve_restricted_dual(x_obs, degree, settings);
    if (result.dual.status == SolveStatus::kInfeasibleDetected) {
      throw std::runtime_error("escalate_degree: solver reported infeasibility");
    }
    result.peaks = locate_peaks(result.dual.q_star, localize);
    std::vector<Frequency> freqs = peak_frequencies(result.peaks);

    CoefficientFit fit;
    if (freqs.empty() || freqs.size() > x_obs.mask().size()) {
      freqs.clear();
      fit.residual = x_obs.values();
      fit.residual_norm = x_obs.norm();
    } else {
      try {
        fit = recover_coeffs(freqs, x_obs);
      } catch (const RankDeficientError&) {
        freqs.clear();
        fit = CoefficientFit{};
        fit.residual = x_obs.values();
        fit.residual_norm = x_obs.norm();
      }
    }
    result.certificate = certify(result.dual.p_m_dual, std::move(freqs), fit, x_obs, tolerances);
    result.certificate.degree = degree;

    EscalationStep step;
    step.degree = degree;
    step.p_m_dual = result.certificate.p_m_dual;
    step.p_primal_f = result.certificate.p_primal_f;
    step.gap = result.certificate.gap;
    step.verdict = result.certificate.verdict;
    step.poles = result.certificate.frequencies.size();
    step.solver_status = result.dual.status;
    step.iterations = result.dual.iterations;
    step.seconds = result.dual.seconds;
    history.push_back(step);

    const bool at_cap = degree == cap ||
                        std::equal(increment.begin(), increment.end(), DegreeVector(d, 0).begin());
    if (result.certificate.certified() || at_cap) {
      result.certificate.history = std::move(history);
      return result;
    }
    for (std::size_t p = 0; p < d; ++p) degree[p] = std::min(degree[p] + increment[p], cap[p]);
  }
}

}  // namespace atomic_sdp
