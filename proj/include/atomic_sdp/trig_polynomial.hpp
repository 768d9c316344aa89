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

#ifndef ATOMIC_SDP_TRIG_POLYNOMIAL_HPP
#define ATOMIC_SDP_TRIG_POLYNOMIAL_HPP

#include <iosfwd>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "atomic_sdp/tensor_signal.hpp"

namespace atomic_sdp {

/// Sum-of-squares relaxation degree (m_1, ..., m_d).
using DegreeVector = std::vector<int>;
/// Generalized diagonal index k with -m_p <= k_p <= m_p.
using DiagonalIndex = std::vector<int>;

/// Number of points in the box prod {0..m_p}, i.e. the Gram matrix order.
std::size_t box_size(std::span<const int> degree);

/// Smallest admissible degree for a grid: m_p = n_p - 1.
DegreeVector minimal_degree(const GridShape& shape);

/// (m+1) x (m+1) matrix with ones where column - row == k.
Eigen::MatrixXd theta_1d(int k, int m);

/// Theta_{k_d} (x) ... (x) Theta_{k_1}. Dense; meant for checks, the solver
/// path assembles the same pattern sparsely.
Eigen::MatrixXd theta_kron(std::span<const int> k, std::span<const int> degree);

/// tr[Theta_k Q] = sum over a with a+k in the box of Q(a+k, a), computed by
/// walking the generalized diagonal.
Complex diagonal_trace(const Eigen::MatrixXcd& gram, std::span<const int> k,
                       std::span<const int> degree);

/// {0} plus every k whose first nonzero coordinate (p = 1..d) is positive,
/// in lexicographic order.
std::vector<DiagonalIndex> halfspace(std::span<const int> degree);

/// Coefficients q over the padded box prod {0..m_p}, in vec_index order.
/// Entries outside the original grid are zero.
class TrigPolynomial {
 public:
  TrigPolynomial() = default;
  TrigPolynomial(GridShape shape, DegreeVector degree, std::vector<Complex> coeffs);

  const GridShape& shape() const { return shape_; }
  const DegreeVector& degree() const { return degree_; }
  const std::vector<Complex>& coeffs() const { return coeffs_; }
  int dimension() const { return shape_.dimension(); }

  /// The unpadded coefficients as a dense tensor over the grid.
  TensorSamples on_grid() const;

 private:
  GridShape shape_;
  DegreeVector degree_;
  std::vector<Complex> coeffs_;
};

TrigPolynomial zero_pad(const TensorSamples& q, const DegreeVector& degree);

/// <q, a(f,0)> = sum_j q_j exp(-i 2 pi f^T j).
Complex eval_dual_poly(const TrigPolynomial& q, std::span<const double> f);

/// Value, gradient and Hessian of |<q, a(f,0)>|^2 with respect to f.
struct ModulusDerivatives {
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd hessian;
};
ModulusDerivatives squared_modulus_derivatives(const TrigPolynomial& q,
                                               std::span<const double> f);

/// |<q, a(f,0)>| sampled at f = (t_1/density_1, ..., t_d/density_d),
/// first axis fastest.
struct ModulusGrid {
  std::vector<int> density;
  std::vector<double> modulus;

  Frequency point(std::size_t offset) const;
  double max() const;
};

ModulusGrid grid_modulus(const TrigPolynomial& q, std::span<const int> density);

/// Per-axis max(2 m_p + 2, 64).
std::vector<int> default_grid_density(std::span<const int> degree);

/// CSV with header f_1,...,f_d,modulus.
void write_modulus_csv(std::ostream& out, const ModulusGrid& grid);

}  // namespace atomic_sdp

#endif  // ATOMIC_SDP_TRIG_POLYNOMIAL_HPP
