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

#ifndef ATOMIC_SDP_TENSOR_SIGNAL_HPP
#define ATOMIC_SDP_TENSOR_SIGNAL_HPP

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace atomic_sdp {

using Complex = std::complex<double>;
using MultiIndex = std::vector<int>;
using Frequency = std::vector<double>;

inline constexpr double kTwoPi = 6.283185307179586476925286766559;

/// Extents (n_1, ..., n_d) of a d-dimensional sample grid.
///
/// Linear offsets use the first coordinate as the fastest-varying one, the
/// same ordering as `vec_index`, so that Kronecker products written as
/// A_d (x) ... (x) A_1 act on linearized tensors without any permutation.
class GridShape {
 public:
  GridShape() = default;
  explicit GridShape(std::vector<int> dims);

  int dimension() const { return static_cast<int>(dims_.size()); }
  int extent(int p) const { return dims_[static_cast<std::size_t>(p)]; }
  const std::vector<int>& dims() const { return dims_; }
  std::size_t size() const { return size_; }

  bool contains(std::span<const int> j) const;
  std::size_t linear(std::span<const int> j) const;
  MultiIndex unravel(std::size_t offset) const;

  friend bool operator==(const GridShape&, const GridShape&) = default;

 private:
  std::vector<int> dims_;
  std::size_t size_ = 0;
};

/// Observed index set M, stored in increasing linear order.
class SampleMask {
 public:
  SampleMask() = default;
  SampleMask(GridShape shape, std::vector<MultiIndex> indices);

  static SampleMask full(const GridShape& shape);

  const GridShape& shape() const { return shape_; }
  const std::vector<MultiIndex>& indices() const { return indices_; }
  const std::vector<std::size_t>& offsets() const { return offsets_; }
  std::size_t size() const { return indices_.size(); }
  bool empty() const { return indices_.empty(); }

  /// Position of `offset` inside the mask, if observed.
  std::optional<std::size_t> find(std::size_t offset) const;

 private:
  GridShape shape_;
  std::vector<MultiIndex> indices_;
  std::vector<std::size_t> offsets_;
};

struct Pole {
  Frequency freq;
  Complex coeff;
};

/// Sum of s complex exponentials x[l] = sum_j c_j exp(i 2 pi f_j^T l).
class SpectralSignal {
 public:
  SpectralSignal() = default;
  SpectralSignal(int dimension, std::vector<Pole> poles);

  int dimension() const { return dimension_; }
  const std::vector<Pole>& poles() const { return poles_; }
  std::size_t sparsity() const { return poles_.size(); }
  double amplitude_sum() const;

  SpectralSignal operator+(const SpectralSignal& other) const;
  SpectralSignal scaled(Complex alpha) const;

 private:
  int dimension_ = 0;
  std::vector<Pole> poles_;
};

/// Complex samples over the full grid (dense) or over a SampleMask (sparse).
class TensorSamples {
 public:
  TensorSamples() = default;

  static TensorSamples dense(GridShape shape, std::vector<Complex> values);
  static TensorSamples sparse(SampleMask mask, std::vector<Complex> values);

  bool is_dense() const { return !mask_.has_value(); }
  const GridShape& shape() const { return shape_; }
  const std::vector<Complex>& values() const { return values_; }
  const SampleMask& mask() const;

  /// Value at a grid index; unobserved entries of a sparse tensor read as 0.
  Complex at(std::span<const int> j) const;
  TensorSamples to_dense() const;
  double norm() const;

 private:
  GridShape shape_;
  std::optional<SampleMask> mask_;
  std::vector<Complex> values_;
};

TensorSamples synthesize(const SpectralSignal& signal, const GridShape& shape);

/// Sub-collection of `x` at the mask indices.
TensorSamples restrict_to(const TensorSamples& x, const SampleMask& mask);

/// 1-based position of `j` in the vectorization of the box prod {0..m_p}.
std::size_t vec_index(std::span<const int> j, std::span<const int> degree);
MultiIndex unvec_index(std::size_t u, std::span<const int> degree);

/// Re(vec(x)^* vec(q)).
double inner_real(const TensorSamples& q, const TensorSamples& x);

/// max_p min(|f_p - g_p|, 1 - |f_p - g_p|) on the unit torus.
double wrap_distance(std::span<const double> f, std::span<const double> g);

/// Maps a real to its representative in [0, 1).
double wrap_unit(double f);

enum class AmplitudeLaw {
  kUnit,             // |c_j| = 1
  kHalfPlusChiSq1,   // 0.5 + chi^2 with one degree of freedom
};

struct Instance {
  SpectralSignal signal;
  SampleMask mask;
  std::uint64_t seed = 0;
};

/// Draws poles, phases, amplitudes and an observation mask from `seed`.
///
/// Frequencies are rejection sampled until every pair is at least
/// `min_separation` apart in wrap-around l-infinity distance. Throws
/// std::runtime_error when the attempt cap is exhausted.
Instance random_instance(const GridShape& shape, int sparsity, int observations,
                         double min_separation, AmplitudeLaw law,
                         std::uint64_t seed);

/// Portable random source. std::mt19937_64 has a standardized output
/// sequence; the distributions are written out here because the standard
/// library ones differ between vendors.
class RandomSource {
 public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed) {}

  double uniform();                      // [0, 1)
  double normal();                       // N(0, 1), Box-Muller
  std::size_t below(std::size_t bound);  // uniform integer in [0, bound)

 private:
  std::mt19937_64 engine_;
  std::optional<double> spare_normal_;
};

}  // namespace atomic_sdp

#endif  // ATOMIC_SDP_TENSOR_SIGNAL_HPP
