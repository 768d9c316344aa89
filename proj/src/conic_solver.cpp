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

// ADMM on the two-set splitting
//
//   minimize  cbar^T w   subject to  w in {Abar w = bbar} and w in C,
//
// where w = (x, s), Abar = [[A, 0], [-G, I]], bbar = (b, h) and
// C = R^n x K. The affine projection uses one sparse LDL^T factorization of
// Abar Abar^T, reused for every iteration and every penalty value.

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>
#include <vector>

#include <Eigen/SparseCholesky>

#include "atomic_sdp/conic.hpp"
#include "psd_projector.hpp"

namespace atomic_sdp {

Eigen::Index ConicProblem::cone_dimension() const {
  Eigen::Index total = 0;
  for (const auto& block : blocks) total += block.svec_size();
  return total;
}

void ConicProblem::validate() const {
  const Eigen::Index n = num_variables();
  if (eq_matrix.rows() != eq_rhs.size() || eq_matrix.cols() != n) {
    throw std::invalid_argument("ConicProblem: equality matrix shape mismatch");
  }
  const Eigen::Index cone_dim = cone_dimension();
  if (cone_matrix.rows() != cone_dim || cone_matrix.cols() != n ||
      cone_offset.size() != cone_dim) {
    throw std::invalid_argument("ConicProblem: cone map shape mismatch");
  }
  for (const auto& block : blocks) {
    if (block.order < 1) throw std::invalid_argument("ConicProblem: empty PSD block");
  }
  Eigen::Index covered = 0;
  for (const auto& segment : layout) {
    if (segment.offset != covered || segment.length < 0) {
      throw std::invalid_argument("ConicProblem: layout segments must tile the variables");
    }
    covered += segment.length;
  }
  if (!layout.empty() && covered != n) {
    throw std::invalid_argument("ConicProblem: layout does not cover every variable");
  }
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal: return "optimal";
    case SolveStatus::kMaxIterations: return "max_iterations";
    case SolveStatus::kInfeasibleDetected: return "infeasible_detected";
  }
  return "unknown";
}

void SolverSettings::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
    throw std::invalid_argument("SolverSettings: tolerances must be positive");
  }
  if (!(relaxation > 0.0 && relaxation < 2.0)) {
    throw std::invalid_argument("SolverSettings: relaxation must lie in (0, 2)");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("SolverSettings: rho must be positive");
  if (max_iterations < 1) throw std::invalid_argument("SolverSettings: max_iterations < 1");
  if (infeasibility_check_period < 1) {
    throw std::invalid_argument("SolverSettings: infeasibility_check_period < 1");
  }
}

namespace {

using Vector = Eigen::VectorXd;

struct Presolved {
  SparseMatrix eq_matrix;
  Vector eq_rhs;
  std::vector<Eigen::Index> kept_rows;  // original row of each kept row
  bool inconsistent = false;
};

// Drops empty and exactly repeated equality rows.
Presolved presolve(const ConicProblem& problem) {
  const SparseMatrix rows = problem.eq_matrix.transpose();  // column r == row r
  std::map<std::vector<std::pair<int, double>>, Eigen::Index> seen;
  Presolved out;
  std::vector<Eigen::Triplet<double>> triplets;
  for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
    std::vector<std::pair<int, double>> pattern;
    for (SparseMatrix::InnerIterator it(rows, r); it; ++it) {
      if (it.value() != 0.0) pattern.emplace_back(static_cast<int>(it.index()), it.value());
    }
    const double rhs = problem.eq_rhs(r);
    if (pattern.empty()) {
      if (std::abs(rhs) > 0.0) out.inconsistent = true;
      continue;
    }
    auto [it, inserted] = seen.emplace(pattern, r);
    if (!inserted) {
      if (problem.eq_rhs(it->second) != rhs) out.inconsistent = true;
      continue;
    }
    const auto kept = static_cast<int>(out.kept_rows.size());
    for (const auto& [col, value] : pattern) triplets.emplace_back(kept, col, value);
    out.kept_rows.push_back(r);
  }
  out.eq_matrix.resize(static_cast<Eigen::Index>(out.kept_rows.size()), problem.num_variables());
  out.eq_matrix.setFromTriplets(triplets.begin(), triplets.end());
  out.eq_rhs.resize(static_cast<Eigen::Index>(out.kept_rows.size()));
  for (std::size_t i = 0; i < out.kept_rows.size(); ++i) {
    out.eq_rhs(static_cast<Eigen::Index>(i)) = problem.eq_rhs(out.kept_rows[i]);
  }
  return out;
}

class AdmmSolver {
 public:
  AdmmSolver(const ConicProblem& problem, const SolverSettings& settings)
      : problem_(problem), settings_(settings) {}

  ConicSolution run();

 private:
  void setup();
  void project_affine(const Vector& v, Vector& w, Vector& lambda) const;
  void project_cone(Eigen::Ref<Vector> w);
  double cone_distance(const Vector& s_part);
  bool primal_infeasible(const Vector& dy);
  bool dual_infeasible(const Vector& dz);
  ConicSolution finish(SolveStatus status, std::string detail, int iterations);

  const ConicProblem& problem_;
  const SolverSettings& settings_;

  Presolved presolved_;
  Eigen::Index n_ = 0;   // variables
  Eigen::Index ns_ = 0;  // cone dimension
  SparseMatrix abar_;
  SparseMatrix abar_t_;
  Vector bbar_;
  Vector cbar_;
  double objective_scale_ = 1.0;
  Eigen::SimplicialLDLT<SparseMatrix> factor_;
  std::vector<internal::BlockProjector> projectors_;
  std::vector<Eigen::Index> block_offsets_;

  double rho_ = 1.0;
  Vector z_, u_, y_;
  double primal_residual_ = 0.0;
  double dual_residual_ = 0.0;
  double gap_ = 0.0;
};

void AdmmSolver::setup() {
  presolved_ = presolve(problem_);
  n_ = problem_.num_variables();
  ns_ = problem_.cone_dimension();
  const Eigen::Index p = presolved_.eq_matrix.rows();

  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(presolved_.eq_matrix.nonZeros() +
                                            problem_.cone_matrix.nonZeros() + ns_));
  for (Eigen::Index c = 0; c < presolved_.eq_matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(presolved_.eq_matrix, c); it; ++it) {
      triplets.emplace_back(static_cast<int>(it.row()), static_cast<int>(it.col()), it.value());
    }
  }
  for (Eigen::Index c = 0; c < problem_.cone_matrix.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(problem_.cone_matrix, c); it; ++it) {
      triplets.emplace_back(static_cast<int>(p + it.row()), static_cast<int>(it.col()),
                            -it.value());
    }
  }
  for (Eigen::Index i = 0; i < ns_; ++i) {
    triplets.emplace_back(static_cast<int>(p + i), static_cast<int>(n_ + i), 1.0);
  }
  abar_.resize(p + ns_, n_ + ns_);
  abar_.setFromTriplets(triplets.begin(), triplets.end());
  abar_.makeCompressed();
  abar_t_ = abar_.transpose();

  bbar_.resize(p + ns_);
  bbar_ << presolved_.eq_rhs, problem_.cone_offset;

  const double cmax = problem_.objective.size() > 0 ? problem_.objective.cwiseAbs().maxCoeff() : 0.0;
  objective_scale_ = cmax > 0.0 ? 1.0 / cmax : 1.0;
  cbar_ = Vector::Zero(n_ + ns_);
  cbar_.head(n_) = objective_scale_ * problem_.objective;

  const SparseMatrix gram = (abar_ * abar_t_).pruned();
  factor_.compute(gram);
  if (factor_.info() != Eigen::Success) {
    throw std::runtime_error("conic solve: factorization of A A^T failed (dependent rows?)");
  }
  const Vector pivots = factor_.vectorD();
  if (pivots.size() > 0 && pivots.minCoeff() <= 1e-12 * std::max(1.0, pivots.maxCoeff())) {
    throw std::runtime_error("conic solve: equality rows are linearly dependent");
  }

  Eigen::Index offset = n_;
  for (const auto& block : problem_.blocks) {
    projectors_.emplace_back(block);
    block_offsets_.push_back(offset);
    offset += block.svec_size();
  }
}

void AdmmSolver::project_affine(const Vector& v, Vector& w, Vector& lambda) const {
  lambda = factor_.solve(Vector(abar_ * v - bbar_));
  w = v - abar_t_ * lambda;
}

void AdmmSolver::project_cone(Eigen::Ref<Vector> w) {
  for (std::size_t b = 0; b < projectors_.size(); ++b) {
    projectors_[b].project(w.segment(block_offsets_[b], problem_.blocks[b].svec_size()));
  }
}

double AdmmSolver::cone_distance(const Vector& s_part) {
  Vector full = Vector::Zero(n_ + ns_);
  full.tail(ns_) = s_part;
  Vector projected = full;
  project_cone(projected);
  return (projected - full).norm();
}

// A direction dy with Abar^T dy = -sigma, sigma in C^*, bbar^T dy > 0 proves
// that no w satisfies both Abar w = bbar and w in C.
bool AdmmSolver::primal_infeasible(const Vector& dy) {
  const double size = dy.norm();
  if (!(size > 0.0)) return false;
  const Vector d = dy / size;
  const double margin = bbar_.dot(d);
  if (!(margin > 0.0)) return false;
  const Vector at = abar_t_ * d;
  const double free_part = at.head(n_).norm();
  const double cone_part = cone_distance(Vector(-at.tail(ns_)));
  const double tol = settings_.infeasibility_tol * margin;
  return free_part <= tol && cone_part <= tol;
}

// A recession direction of the feasible set along which the objective
// decreases without bound.
bool AdmmSolver::dual_infeasible(const Vector& dz) {
  const double size = dz.norm();
  if (!(size > 0.0)) return false;
  const Vector d = dz / size;
  const double descent = -cbar_.dot(d);
  if (!(descent > 0.0)) return false;
  const double tol = settings_.infeasibility_tol * descent;
  return (abar_ * d).norm() <= tol && cone_distance(Vector(d.tail(ns_))) <= tol;
}

ConicSolution AdmmSolver::finish(SolveStatus status, std::string detail, int iterations) {
  ConicSolution out;
  out.status = status;
  out.detail = std::move(detail);
  out.iterations = iterations;
  out.final_rho = rho_;
  out.x = z_.head(n_);
  out.slack = z_.tail(ns_);
  out.objective = problem_.objective.dot(out.x) + problem_.objective_offset;
  const Eigen::Index p = presolved_.eq_matrix.rows();
  out.eq_dual = Vector::Zero(problem_.num_equalities());
  for (Eigen::Index i = 0; i < p; ++i) {
    out.eq_dual(presolved_.kept_rows[static_cast<std::size_t>(i)]) = y_(i) / objective_scale_;
  }
  out.cone_dual = -rho_ * u_.tail(ns_) / objective_scale_;
  out.dual_objective = bbar_.dot(y_) / objective_scale_ + problem_.objective_offset;
  out.primal_residual = primal_residual_;
  out.dual_residual = dual_residual_ / objective_scale_;
  out.gap = gap_ / objective_scale_;
  return out;
}

ConicSolution AdmmSolver::run() {
  problem_.validate();
  settings_.validate();
  setup();
  const Eigen::Index dim = n_ + ns_;
  z_ = Vector::Zero(dim);
  u_ = Vector::Zero(dim);
  y_ = Vector::Zero(abar_.rows());
  rho_ = settings_.rho;
  if (presolved_.inconsistent) {
    return finish(SolveStatus::kInfeasibleDetected, "inconsistent equality rows", 0);
  }

  const double alpha = settings_.relaxation;
  const double eps_abs = settings_.abs_tol;
  const double eps_rel = settings_.rel_tol;
  const double bbar_norm = bbar_.norm();
  const double cbar_norm = cbar_.norm();
  constexpr int kRhoPeriod = 25;
  constexpr double kImbalance = 10.0;

  Vector v(dim), w(dim), lambda, w_relaxed(dim), z_prev(dim), dual_vec(dim);
  Vector y_mark = y_, z_mark = z_;
  double prim_ratio_acc = 0.0;
  int ratio_samples = 0;

  if (settings_.trace) *settings_.trace << "iteration,primal_residual,dual_residual,objective\n";

  for (int k = 1; k <= settings_.max_iterations; ++k) {
    v = z_ - u_ - cbar_ / rho_;
    project_affine(v, w, lambda);
    y_ = -rho_ * lambda;
    w_relaxed = alpha * w + (1.0 - alpha) * z_;
    z_prev = z_;
    z_ = w_relaxed + u_;
    project_cone(z_);
    u_ += w_relaxed - z_;

    // Residuals of the cone-feasible iterate z and the multipliers (y, -rho u).
    const Vector az = abar_ * z_;
    primal_residual_ = (az - bbar_).norm();
    // Abar^T y = rho (w - v); the dual slack is -rho u.
    dual_vec = cbar_ - rho_ * (w - v) + rho_ * u_;
    dual_residual_ = dual_vec.norm();
    const double pobj = cbar_.dot(z_);
    const double dobj = bbar_.dot(y_);
    gap_ = std::abs(pobj - dobj);

    const double prim_scale = std::max(bbar_norm, az.norm());
    const double dual_scale =
        std::max({cbar_norm, rho_ * (w - v).norm(), rho_ * u_.norm()});
    const bool converged = primal_residual_ <= eps_abs + eps_rel * prim_scale &&
                           dual_residual_ <= eps_abs + eps_rel * dual_scale &&
                           gap_ <= eps_abs + eps_rel * std::max(std::abs(pobj), std::abs(dobj));

    if (settings_.trace) {
      *settings_.trace << k << ',' << primal_residual_ << ',' << dual_residual_ / objective_scale_
                       << ',' << pobj / objective_scale_ + problem_.objective_offset << '\n';
    }
    if (converged) return finish(SolveStatus::kOptimal, "converged", k);

    if (k % settings_.infeasibility_check_period == 0) {
      if (primal_infeasible(Vector(y_ - y_mark))) {
        return finish(SolveStatus::kInfeasibleDetected, "primal infeasibility certificate", k);
      }
      if (dual_infeasible(Vector(z_ - z_mark))) {
        return finish(SolveStatus::kInfeasibleDetected, "dual infeasibility certificate", k);
      }
      y_mark = y_;
      z_mark = z_;
    }

    if (settings_.adaptive_rho) {
      const double rel_prim = primal_residual_ / std::max(prim_scale, 1e-300);
      const double rel_dual = dual_residual_ / std::max(dual_scale, 1e-300);
      if (rel_prim > 0.0 && rel_dual > 0.0) {
        prim_ratio_acc += std::log(rel_prim / rel_dual);
        ++ratio_samples;
      }
      if (k % kRhoPeriod == 0 && ratio_samples > 0) {
        const double ratio = std::exp(prim_ratio_acc / ratio_samples);
        if (ratio > kImbalance || ratio < 1.0 / kImbalance) {
          const double factor = std::sqrt(ratio);
          rho_ *= factor;
          u_ /= factor;
        }
        prim_ratio_acc = 0.0;
        ratio_samples = 0;
      }
    }
  }
  return finish(SolveStatus::kMaxIterations, "iteration limit reached", settings_.max_iterations);
}

}  // namespace

ConicSolution solve(const ConicProblem& problem, const SolverSettings& settings) {
  AdmmSolver solver(problem, settings);
  return solver.run();
}

void write_problem_dump(std::ostream& out, const ConicProblem& problem) {
  out.precision(17);
  out << "# variables " << problem.num_variables() << '\n';
  for (const auto& segment : problem.layout) {
    out << "# segment " << segment.name << ' ' << segment.offset << ' ' << segment.length << '\n';
  }
  out << "# objective_offset " << problem.objective_offset << '\n';
  out << "# objective (col value)\n";
  for (Eigen::Index i = 0; i < problem.objective.size(); ++i) {
    if (problem.objective(i) != 0.0) out << i << ' ' << problem.objective(i) << '\n';
  }
  auto dump_matrix = [&out](const SparseMatrix& m) {
    const SparseMatrix rows = m.transpose();
    for (Eigen::Index r = 0; r < rows.outerSize(); ++r) {
      for (SparseMatrix::InnerIterator it(rows, r); it; ++it) {
        out << r << ' ' << it.index() << ' ' << it.value() << '\n';
      }
    }
  };
  out << "# equalities " << problem.num_equalities() << " (row col value)\n";
  dump_matrix(problem.eq_matrix);
  out << "# equality_rhs (row value)\n";
  for (Eigen::Index i = 0; i < problem.eq_rhs.size(); ++i) {
    if (problem.eq_rhs(i) != 0.0) out << i << ' ' << problem.eq_rhs(i) << '\n';
  }
  out << "# blocks";
  for (const auto& block : problem.blocks) {
    out << ' ' << (block.field == BlockField::kReal ? "real:" : "complex:") << block.order;
  }
  out << '\n';
  out << "# cone_map " << problem.cone_dimension() << " (row col value)\n";
  dump_matrix(problem.cone_matrix);
  out << "# cone_offset (row value)\n";
  for (Eigen::Index i = 0; i < problem.cone_offset.size(); ++i) {
    if (problem.cone_offset(i) != 0.0) out << i << ' ' << problem.cone_offset(i) << '\n';
  }
}

}  // namespace atomic_sdp
