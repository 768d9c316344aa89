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

#include "atomic_sdp/trig_polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <unsupported/Eigen/KroneckerProduct>

namespace atomic_sdp {
namespace {

void check_degree(std::span<const int> degree) {
  if (degree.empty()) throw std::invalid_argument("degree vector is empty");
  for (int m : degree) {
    if (m < 0) throw std::invalid_argument("degree components must be nonnegative");
  }
}

// Per-axis phasor tables exp(-i 2 pi f_p j) for j = 0..n_p-1.
std::vector<std::vector<Complex>> axis_phasors(const GridShape& shape,
                                               std::span<const double> f) {
  std::vector<std::vector<Complex>> table(static_cast<std::size_t>(shape.dimension()));
  for (int p = 0; p < shape.dimension(); ++p) {
    auto& row = table[static_cast<std::size_t>(p)];
    row.resize(static_cast<std::size_t>(shape.extent(p)));
    for (int j = 0; j < shape.extent(p); ++j) {
      row[static_cast<std::size_t>(j)] = std::polar(1.0, -kTwoPi * f[static_cast<std::size_t>(p)] * j);
    }
  }
  return table;
}

void check_frequency(const TrigPolynomial& q, std::span<const double> f) {
  if (static_cast<int>(f.size()) != q.dimension()) {
    throw std::invalid_argument("frequency dimension differs from polynomial dimension");
  }
}

}  // namespace

std::size_t box_size(std::span<const int> degree) {
  std::size_t total = 1;
  for (int m : degree) total *= static_cast<std::size_t>(m + 1);
  return total;
}

DegreeVector minimal_degree(const GridShape& shape) {
  DegreeVector m;
  for (int n : shape.dims()) m.push_back(n - 1);
  return m;
}

Eigen::MatrixXd theta_1d(int k, int m) {
  if (m < 0 || std::abs(k) > m) {
    throw std::out_of_range("theta_1d: diagonal index outside [-m, m]");
  }
  Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(m + 1, m + 1);
  for (int a = 0; a <= m; ++a) {
    const int b = a + k;
    if (b >= 0 && b <= m) theta(a, b) = 1.0;
  }
  return theta;
}

Eigen::MatrixXd theta_kron(std::span<const int> k, std::span<const int> degree) {
  check_degree(degree);
  if (k.size() != degree.size()) {
    throw std::invalid_argument("theta_kron: diagonal index and degree dimensions differ");
  }
  Eigen::MatrixXd result = theta_1d(k[0], degree[0]);
  for (std::size_t p = 1; p < degree.size(); ++p) {
    Eigen::MatrixXd next = Eigen::kroneckerProduct(theta_1d(k[p], degree[p]), result).eval();
    result = std::move(next);
  }
  return result;
}

Complex diagonal_trace(const Eigen::MatrixXcd& gram, std::span<const int> k,
                       std::span<const int> degree) {
  const auto size = static_cast<Eigen::Index>(box_size(degree));
  if (k.size() != degree.size() || gram.rows() != size || gram.cols() != size) {
    throw std::invalid_argument("diagonal_trace: dimension mismatch");
  }
  Complex acc(0.0, 0.0);
  MultiIndex shifted(k.size());
  for (std::size_t u = 1; u <= box_size(degree); ++u) {
    const MultiIndex a = unvec_index(u, degree);
    bool inside = true;
    for (std::size_t p = 0; p < k.size(); ++p) {
      shifted[p] = a[p] + k[p];
      inside = inside && shifted[p] >= 0 && shifted[p] <= degree[p];
    }
    if (!inside) continue;
    const auto row = static_cast<Eigen::Index>(vec_index(shifted, degree) - 1);
    acc += gram(row, static_cast<Eigen::Index>(u - 1));
  }
  return acc;
}

std::vector<DiagonalIndex> halfspace(std::span<const int> degree) {
  check_degree(degree);
  const std::size_t d = degree.size();
  std::vector<DiagonalIndex> result;
  DiagonalIndex k(d);
  for (std::size_t p = 0; p < d; ++p) k[p] = -degree[p];
  // Odometer over the symmetric box, last coordinate fastest, which yields
  // lexicographic order.
  while (true) {
    auto first = std::find_if(k.begin(), k.end(), [](int v) { return v != 0; });
    if (first == k.end() || *first > 0) result.push_back(k);
    std::size_t p = d;
    while (p > 0) {
      --p;
      if (k[p] < degree[p]) {
        ++k[p];
        break;
      }
      k[p] = -degree[p];
      if (p == 0) return result;
    }
  }
}

TrigPolynomial::TrigPolynomial(GridShape shape, DegreeVector degree, std::vector<Complex> coeffs)
    : shape_(std::move(shape)), degree_(std::move(degree)), coeffs_(std::move(coeffs)) {
  check_degree(degree_);
  if (static_cast<int>(degree_.size()) != shape_.dimension()) {
    throw std::invalid_argument("TrigPolynomial: degree and grid dimensions differ");
  }
  for (int p = 0; p < shape_.dimension(); ++p) {
    if (degree_[static_cast<std::size_t>(p)] < shape_.extent(p) - 1) {
      throw std::invalid_argument("TrigPolynomial: degree below n_p - 1");
    }
  }
  if (coeffs_.size() != box_size(degree_)) {
    throw std::invalid_argument("TrigPolynomial: coefficient count must equal padded box size");
  }
  for (std::size_t u = 1; u <= coeffs_.size(); ++u) {
    if (coeffs_[u - 1] != Complex(0.0, 0.0) && !shape_.contains(unvec_index(u, degree_))) {
      throw std::invalid_argument("TrigPolynomial: nonzero coefficient outside the grid");
    }
  }
}

TensorSamples TrigPolynomial::on_grid() const {
  std::vector<Complex> values(shape_.size());
  for (std::size_t o = 0; o < shape_.size(); ++o) {
    values[o] = coeffs_[vec_index(shape_.unravel(o), degree_) - 1];
  }
  return TensorSamples::dense(shape_, std::move(values));
}

TrigPolynomial zero_pad(const TensorSamples& q, const DegreeVector& degree) {
  const GridShape& shape = q.shape();
  if (static_cast<int>(degree.size()) != shape.dimension()) {
    throw std::invalid_argument("zero_pad: degree and grid dimensions differ");
  }
  for (int p = 0; p < shape.dimension(); ++p) {
    if (degree[static_cast<std::size_t>(p)] < shape.extent(p) - 1) {
      throw std::invalid_argument("zero_pad: degree below n_p - 1");
    }
  }
  std::vector<Complex> coeffs(box_size(degree), Complex(0.0, 0.0));
  if (q.is_dense()) {
    for (std::size_t o = 0; o < shape.size(); ++o) {
      coeffs[vec_index(shape.unravel(o), degree) - 1] = q.values()[o];
    }
  } else {
    const auto& indices = q.mask().indices();
    for (std::size_t i = 0; i < indices.size(); ++i) {
      coeffs[vec_index(indices[i], degree) - 1] = q.values()[i];
    }
  }
  return TrigPolynomial(shape, degree, std::move(coeffs));
}

Complex eval_dual_poly(const TrigPolynomial& q, std::span<const double> f) {
  check_frequency(q, f);
  const GridShape& shape = q.shape();
  const auto table = axis_phasors(shape, f);
  Complex acc(0.0, 0.0);
  for (std::size_t o = 0; o < shape.size(); ++o) {
    const MultiIndex j = shape.unravel(o);
    const Complex c = q.coeffs()[vec_index(j, q.degree()) - 1];
    if (c == Complex(0.0, 0.0)) continue;
    Complex phasor = c;
    for (std::size_t p = 0; p < j.size(); ++p) phasor *= table[p][static_cast<std::size_t>(j[p])];
    acc += phasor;
  }
  return acc;
}

ModulusDerivatives squared_modulus_derivatives(const TrigPolynomial& q,
                                               std::span<const double> f) {
  check_frequency(q, f);
  const GridShape& shape = q.shape();
  const int d = shape.dimension();
  const auto table = axis_phasors(shape, f);

  Complex value(0.0, 0.0);
  Eigen::VectorXcd grad = Eigen::VectorXcd::Zero(d);
  Eigen::MatrixXcd hess = Eigen::MatrixXcd::Zero(d, d);
  const Complex minus_i_two_pi(0.0, -kTwoPi);
  for (std::size_t o = 0; o < shape.size(); ++o) {
    const MultiIndex j = shape.unravel(o);
    const Complex c = q.coeffs()[vec_index(j, q.degree()) - 1];
    if (c == Complex(0.0, 0.0)) continue;
    Complex term = c;
    for (int p = 0; p < d; ++p) term *= table[static_cast<std::size_t>(p)][static_cast<std::size_t>(j[static_cast<std::size_t>(p)])];
    value += term;
    for (int p = 0; p < d; ++p) {
      const Complex dp = minus_i_two_pi * static_cast<double>(j[static_cast<std::size_t>(p)]);
      grad(p) += dp * term;
      for (int r = 0; r <= p; ++r) {
        const Complex dr = minus_i_two_pi * static_cast<double>(j[static_cast<std::size_t>(r)]);
        hess(p, r) += dp * dr * term;
      }
    }
  }
  ModulusDerivatives out;
  out.value = std::norm(value);
  out.gradient.resize(d);
  out.hessian.resize(d, d);
  for (int p = 0; p < d; ++p) {
    out.gradient(p) = 2.0 * (std::conj(value) * grad(p)).real();
    for (int r = 0; r <= p; ++r) {
      const double h =
          2.0 * (std::conj(grad(r)) * grad(p) + std::conj(value) * hess(p, r)).real();
      out.hessian(p, r) = h;
      out.hessian(r, p) = h;
    }
  }
  return out;
}

Frequency ModulusGrid::point(std::size_t offset) const {
  Frequency f(density.size());
  for (std::size_t p = 0; p < density.size(); ++p) {
    const auto n = static_cast<std::size_t>(density[p]);
    f[p] = static_cast<double>(offset % n) / static_cast<double>(n);
    offset /= n;
  }
  return f;
}

double ModulusGrid::max() const {
  return modulus.empty() ? 0.0 : *std::max_element(modulus.begin(), modulus.end());
}

ModulusGrid grid_modulus(const TrigPolynomial& q, std::span<const int> density) {
  const GridShape& shape = q.shape();
  const int d = shape.dimension();
  if (static_cast<int>(density.size()) != d) {
    throw std::invalid_argument("grid_modulus: density must have one entry per dimension");
  }
  for (int n : density) {
    if (n < 1) throw std::invalid_argument("grid_modulus: density must be >= 1");
  }

  // Gather the on-grid support once.
  std::vector<MultiIndex> support;
  std::vector<Complex> coeff;
  for (std::size_t o = 0; o < shape.size(); ++o) {
    MultiIndex j = shape.unravel(o);
    const Complex c = q.coeffs()[vec_index(j, q.degree()) - 1];
    if (c == Complex(0.0, 0.0)) continue;
    support.push_back(std::move(j));
    coeff.push_back(c);
  }

  // Exact phasor tables: exp(-i 2 pi t j / density) depends on (t j) mod density.
  std::vector<std::vector<Complex>> roots(static_cast<std::size_t>(d));
  for (int p = 0; p < d; ++p) {
    const int n = density[static_cast<std::size_t>(p)];
    auto& row = roots[static_cast<std::size_t>(p)];
    row.resize(static_cast<std::size_t>(n));
    for (int r = 0; r < n; ++r) {
      row[static_cast<std::size_t>(r)] = std::polar(1.0, -kTwoPi * r / n);
    }
  }

  ModulusGrid grid;
  grid.density.assign(density.begin(), density.end());
  std::size_t total = 1;
  for (int n : density) total *= static_cast<std::size_t>(n);
  grid.modulus.resize(total);
  std::vector<int> t(static_cast<std::size_t>(d), 0);
  for (std::size_t o = 0; o < total; ++o) {
    std::size_t rest = o;
    for (int p = 0; p < d; ++p) {
      const auto n = static_cast<std::size_t>(density[static_cast<std::size_t>(p)]);
      t[static_cast<std::size_t>(p)] = static_cast<int>(rest % n);
      rest /= n;
    }
    Complex acc(0.0, 0.0);
    for (std::size_t s = 0; s < support.size(); ++s) {
      Complex term = coeff[s];
      for (int p = 0; p < d; ++p) {
        const auto pp = static_cast<std::size_t>(p);
        const long n = density[pp];
        const long r = (static_cast<long>(t[pp]) * support[s][pp]) % n;
        term *= roots[pp][static_cast<std::size_t>(r)];
      }
      acc += term;
    }
    grid.modulus[o] = std::abs(acc);
  }
  return grid;
}

std::vector<int> default_grid_density(std::span<const int> degree) {
  std::vector<int> density;
  for (int m : degree) density.push_back(std::max(2 * m + 2, 64));
  return density;
}

void write_modulus_csv(std::ostream& out, const ModulusGrid& grid) {
  const std::size_t d = grid.density.size();
  for (std::size_t p = 0; p < d; ++p) out << "f_" << (p + 1) << ',';
  out << "modulus\n";
  out << std::setprecision(17);
  for (std::size_t o = 0; o < grid.modulus.size(); ++o) {
    const Frequency f = grid.point(o);
    for (double fp : f) out << fp << ',';
    out << grid.modulus[o] << '\n';
  }
}

}  // namespace atomic_sdp
