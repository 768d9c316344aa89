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

// Standard-form conic programs with free variables, affine equalities and
// real-symmetric or complex-Hermitian PSD blocks, and an ADMM solver for them.
//
//   minimize    c^T x + offset
//   subject to  A x = b
//               svec(S_i) = G_i x + h_i,   S_i PSD   for every block i
//
// Complex structure never reaches the solver: a Hermitian block of order n
// is carried as n^2 reals (the diagonal plus sqrt(2)-scaled real and
// imaginary parts of the strict upper triangle), so that the Euclidean inner
// product of two svecs equals Re tr(S T).

#ifndef ATOMIC_SDP_CONIC_HPP
#define ATOMIC_SDP_CONIC_HPP

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

namespace atomic_sdp {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

enum class BlockField { kReal, kComplex };

struct PsdBlock {
  int order = 0;
  BlockField field = BlockField::kReal;

  Eigen::Index svec_size() const;
};

// svec layout, column by column over the upper triangle.
//   real:    (i, j), i <= j  ->  j (j + 1) / 2 + i
//   complex: (i, i)          ->  j^2 + 2 j  (with j = i)
//            (i, j), i < j   ->  j^2 + 2 i (real part), j^2 + 2 i + 1 (imag)
// A Hermitian block's leading principal submatrix therefore occupies a
// prefix of its svec.
Eigen::Index real_svec_offset(int i, int j);
Eigen::Index complex_svec_offset(int i, int j);

Eigen::VectorXd svec(const Eigen::MatrixXd& symmetric);
Eigen::VectorXd svec(const Eigen::MatrixXcd& hermitian);
Eigen::MatrixXd smat_real(const Eigen::Ref<const Eigen::VectorXd>& v, int order);
Eigen::MatrixXcd smat_complex(const Eigen::Ref<const Eigen::VectorXd>& v, int order);

/// Named contiguous range of the variable vector.
struct VariableSegment {
  std::string name;
  Eigen::Index offset = 0;
  Eigen::Index length = 0;
};

struct ConicProblem {
  Eigen::VectorXd objective;
  double objective_offset = 0.0;
  SparseMatrix eq_matrix;
  Eigen::VectorXd eq_rhs;
  std::vector<PsdBlock> blocks;
  SparseMatrix cone_matrix;  // rows: stacked block svecs
  Eigen::VectorXd cone_offset;
  std::vector<VariableSegment> layout;

  Eigen::Index num_variables() const { return objective.size(); }
  Eigen::Index num_equalities() const { return eq_rhs.size(); }
  Eigen::Index cone_dimension() const;

  /// Throws std::invalid_argument on inconsistent sizes.
  void validate() const;
};

enum class SolveStatus { kOptimal, kMaxIterations, kInfeasibleDetected };

const char* to_string(SolveStatus status);

struct ConicSolution {
  SolveStatus status = SolveStatus::kMaxIterations;
  std::string detail;
  Eigen::VectorXd x;
  Eigen::VectorXd slack;      // stacked svec(S_i), exactly inside the cone
  Eigen::VectorXd eq_dual;    // multipliers of A x = b
  Eigen::VectorXd cone_dual;  // stacked svec(Z_i), Z_i PSD
  double objective = 0.0;
  double dual_objective = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap = 0.0;
  int iterations = 0;
  double final_rho = 0.0;
};

struct SolverSettings {
  double abs_tol = 1e-8;
  double rel_tol = 1e-7;
  int max_iterations = 50000;
  double relaxation = 1.6;
  double rho = 1.0;
  bool adaptive_rho = true;
  int infeasibility_check_period = 100;
  double infeasibility_tol = 1e-6;
  /// When set, one CSV row per iteration: iteration,primal_residual,
  /// dual_residual,objective.
  std::ostream* trace = nullptr;

  void validate() const;
};

/// [[Re H, -Im H], [Im H, Re H]]; throws if H is not Hermitian to 1e-12.
Eigen::MatrixXd herm_embed(const Eigen::MatrixXcd& hermitian);

/// Frobenius-nearest PSD matrix (negative eigenvalues clamped to zero).
Eigen::MatrixXd psd_project(const Eigen::MatrixXd& symmetric);
Eigen::MatrixXcd psd_project(const Eigen::MatrixXcd& hermitian);

ConicSolution solve(const ConicProblem& problem, const SolverSettings& settings = {});

/// Plain-text dump for external verification. Sections are introduced by a
/// header line; each entry is "row col value" with 0-based indices.
void write_problem_dump(std::ostream& out, const ConicProblem& problem);

}  // namespace atomic_sdp

#endif  // ATOMIC_SDP_CONIC_HPP
