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
#include <complex>
#include <stdexcept>
#include <string>

#include <lapacke.h>

#include "atomic_sdp/conic.hpp"
#include "psd_projector.hpp"

namespace atomic_sdp {

using Complex = std::complex<double>;
namespace {

constexpr double kSqrt2 = 1.41421356237309504880168872420969808;

void require_square(Eigen::Index rows, Eigen::Index cols, const char* what) {
  if (rows != cols) throw std::invalid_argument(std::string(what) + ": matrix is not square");
}

}  // namespace

Eigen::Index PsdBlock::svec_size() const {
  const auto n = static_cast<Eigen::Index>(order);
  return field == BlockField::kReal ? n * (n + 1) / 2 : n * n;
}

Eigen::Index real_svec_offset(int i, int j) {
  if (i > j) std::swap(i, j);
  return static_cast<Eigen::Index>(j) * (j + 1) / 2 + i;
}

Eigen::Index complex_svec_offset(int i, int j) {
  if (i > j) std::swap(i, j);
  const auto col = static_cast<Eigen::Index>(j);
  return col * col + 2 * static_cast<Eigen::Index>(i);
}

Eigen::VectorXd svec(const Eigen::MatrixXd& symmetric) {
  require_square(symmetric.rows(), symmetric.cols(), "svec");
  const int n = static_cast<int>(symmetric.rows());
  Eigen::VectorXd v(PsdBlock{n, BlockField::kReal}.svec_size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) v(real_svec_offset(i, j)) = kSqrt2 * symmetric(i, j);
    v(real_svec_offset(j, j)) = symmetric(j, j);
  }
  return v;
}

Eigen::VectorXd svec(const Eigen::MatrixXcd& hermitian) {
  require_square(hermitian.rows(), hermitian.cols(), "svec");
  const int n = static_cast<int>(hermitian.rows());
  Eigen::VectorXd v(PsdBlock{n, BlockField::kComplex}.svec_size());
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < j; ++i) {
      const Eigen::Index o = complex_svec_offset(i, j);
      v(o) = kSqrt2 * hermitian(i, j).real();
      v(o + 1) = kSqrt2 * hermitian(i, j).imag();
    }
    v(complex_svec_offset(j, j)) = hermitian(j, j).real();
  }
  return v;
}

Eigen::MatrixXd smat_real(const Eigen::Ref<const Eigen::VectorXd>& v, int order) {
  if (v.size() != PsdBlock{order, BlockField::kReal}.svec_size()) {
    throw std::invalid_argument("smat_real: packed size mismatch");
  }
  Eigen::MatrixXd m(order, order);
  for (int j = 0; j < order; ++j) {
    for (int i = 0; i < j; ++i) {
      const double value = v(real_svec_offset(i, j)) / kSqrt2;
      m(i, j) = value;
      m(j, i) = value;
    }
    m(j, j) = v(real_svec_offset(j, j));
  }
  return m;
}

Eigen::MatrixXcd smat_complex(const Eigen::Ref<const Eigen::VectorXd>& v, int order) {
  if (v.size() != PsdBlock{order, BlockField::kComplex}.svec_size()) {
    throw std::invalid_argument("smat_complex: packed size mismatch");
  }
  Eigen::MatrixXcd m(order, order);
  for (int j = 0; j < order; ++j) {
    for (int i = 0; i < j; ++i) {
      const Eigen::Index o = complex_svec_offset(i, j);
      const Complex value(v(o) / kSqrt2, v(o + 1) / kSqrt2);
      m(i, j) = value;
      m(j, i) = std::conj(value);
    }
    m(j, j) = v(complex_svec_offset(j, j));
  }
  return m;
}

Eigen::MatrixXd herm_embed(const Eigen::MatrixXcd& hermitian) {
  require_square(hermitian.rows(), hermitian.cols(), "herm_embed");
  if ((hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("herm_embed: matrix is not Hermitian");
  }
  const Eigen::Index n = hermitian.rows();
  Eigen::MatrixXd out(2 * n, 2 * n);
  out.topLeftCorner(n, n) = hermitian.real();
  out.topRightCorner(n, n) = -hermitian.imag();
  out.bottomLeftCorner(n, n) = hermitian.imag();
  out.bottomRightCorner(n, n) = hermitian.real();
  return out;
}

Eigen::MatrixXd psd_project(const Eigen::MatrixXd& symmetric) {
  require_square(symmetric.rows(), symmetric.cols(), "psd_project");
  if ((symmetric - symmetric.transpose()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, symmetric.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("psd_project: matrix is not symmetric");
  }
  const int n = static_cast<int>(symmetric.rows());
  if (n == 0) return symmetric;
  Eigen::VectorXd packed = svec(symmetric);
  internal::BlockProjector(PsdBlock{n, BlockField::kReal}).project(packed);
  return smat_real(packed, n);
}

Eigen::MatrixXcd psd_project(const Eigen::MatrixXcd& hermitian) {
  require_square(hermitian.rows(), hermitian.cols(), "psd_project");
  if ((hermitian - hermitian.adjoint()).cwiseAbs().maxCoeff() >
      1e-10 * std::max(1.0, hermitian.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("psd_project: matrix is not Hermitian");
  }
  const int n = static_cast<int>(hermitian.rows());
  if (n == 0) return hermitian;
  Eigen::VectorXd packed = svec(hermitian);
  internal::BlockProjector(PsdBlock{n, BlockField::kComplex}).project(packed);
  return smat_complex(packed, n);
}

namespace internal {

BlockProjector::BlockProjector(PsdBlock block) : block_(block) {
  const int n = block_.order;
  values_.resize(n);
  support_.resize(static_cast<std::size_t>(2 * std::max(n, 1)));
  if (block_.field == BlockField::kReal) {
    real_work_.resize(n, n);
    real_vectors_.resize(n, n);
  } else {
    complex_work_.resize(n, n);
    complex_vectors_.resize(n, n);
  }
}

void BlockProjector::project(Eigen::Ref<Eigen::VectorXd> packed) {
  if (block_.order == 1) {
    packed(0) = std::max(packed(0), 0.0);
    return;
  }
  if (block_.field == BlockField::kReal) {
    project_real(packed);
  } else {
    project_complex(packed);
  }
}

void BlockProjector::project_real(Eigen::Ref<Eigen::VectorXd> packed) {
  const int n = block_.order;
  const double bound = packed.norm() + 1.0;
  const bool want_negative = negative_hint_ <= n / 2;
  const double lower = want_negative ? -bound : 0.0;
  const double upper = want_negative ? 0.0 : bound;

  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) real_work_(i, j) = packed(real_svec_offset(j, i)) / kSqrt2;
    real_work_(j, j) = packed(real_svec_offset(j, j));
  }
  lapack_int found = 0;
  const lapack_int info = LAPACKE_dsyevr(
      LAPACK_COL_MAJOR, 'V', 'V', 'L', n, real_work_.data(), n, lower, upper, 0, 0, 0.0, &found,
      values_.data(), real_vectors_.data(), n, support_.data());
  if (info != 0) throw std::runtime_error("psd projection: dsyevr failed");

  Eigen::MatrixXd result;
  const auto k = static_cast<Eigen::Index>(found);
  const auto vectors = real_vectors_.leftCols(k);
  if (want_negative) {
    result = smat_real(packed, n);
    result.noalias() -= vectors * values_.head(k).asDiagonal() * vectors.transpose();
    negative_hint_ = found;
  } else {
    result.noalias() = vectors * values_.head(k).asDiagonal() * vectors.transpose();
    negative_hint_ = n - found;
  }
  packed = svec(Eigen::MatrixXd(0.5 * (result + result.transpose())));
}

void BlockProjector::project_complex(Eigen::Ref<Eigen::VectorXd> packed) {
  const int n = block_.order;
  const double bound = packed.norm() + 1.0;
  const bool want_negative = negative_hint_ <= n / 2;
  const double lower = want_negative ? -bound : 0.0;
  const double upper = want_negative ? 0.0 : bound;

  for (int j = 0; j < n; ++j) {
    for (int i = j + 1; i < n; ++i) {
      const Eigen::Index o = complex_svec_offset(j, i);
      complex_work_(i, j) = Complex(packed(o), -packed(o + 1)) / kSqrt2;
    }
    complex_work_(j, j) = packed(complex_svec_offset(j, j));
  }
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, 'V', 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(complex_work_.data()), n, lower, upper, 0, 0, 0.0,
      &found, values_.data(), reinterpret_cast<lapack_complex_double*>(complex_vectors_.data()),
      n, support_.data());
  if (info != 0) throw std::runtime_error("psd projection: zheevr failed");

  const auto k = static_cast<Eigen::Index>(found);
  const auto vectors = complex_vectors_.leftCols(k);
  Eigen::MatrixXcd update = vectors * values_.head(k).asDiagonal() * vectors.adjoint();
  if (want_negative) {
    negative_hint_ = found;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < j; ++i) {
        const Eigen::Index o = complex_svec_offset(i, j);
        const Complex u = 0.5 * (update(i, j) + std::conj(update(j, i)));
        packed(o) -= kSqrt2 * u.real();
        packed(o + 1) -= kSqrt2 * u.imag();
      }
      packed(complex_svec_offset(j, j)) -= update(j, j).real();
    }
  } else {
    negative_hint_ = n - found;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < j; ++i) {
        const Eigen::Index o = complex_svec_offset(i, j);
        const Complex u = 0.5 * (update(i, j) + std::conj(update(j, i)));
        packed(o) = kSqrt2 * u.real();
        packed(o + 1) = kSqrt2 * u.imag();
      }
      packed(complex_svec_offset(j, j)) = update(j, j).real();
    }
  }
}

double BlockProjector::min_eigenvalue(const Eigen::Ref<const Eigen::VectorXd>& packed) const {
  if (block_.field == BlockField::kReal) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(smat_real(packed, block_.order),
                                                       Eigen::EigenvaluesOnly);
    return eig.eigenvalues()(0);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(smat_complex(packed, block_.order),
                                                      Eigen::EigenvaluesOnly);
  return eig.eigenvalues()(0);
}

}  // namespace internal
}  // namespace atomic_sdp
