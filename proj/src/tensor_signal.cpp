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

#include "atomic_sdp/tensor_signal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

namespace atomic_sdp {

GridShape::GridShape(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    throw std::invalid_argument("GridShape: dimension must be at least 1");
  }
  size_ = 1;
  for (int n : dims_) {
    if (n < 1) throw std::invalid_argument("GridShape: extents must be positive");
    size_ *= static_cast<std::size_t>(n);
  }
}

bool GridShape::contains(std::span<const int> j) const {
  if (j.size() != dims_.size()) return false;
  for (std::size_t p = 0; p < j.size(); ++p) {
    if (j[p] < 0 || j[p] >= dims_[p]) return false;
  }
  return true;
}

std::size_t GridShape::linear(std::span<const int> j) const {
  if (!contains(j)) throw std::out_of_range("GridShape: index outside grid");
  std::size_t offset = 0;
  for (std::size_t p = dims_.size(); p-- > 0;) {
    offset = offset * static_cast<std::size_t>(dims_[p]) + static_cast<std::size_t>(j[p]);
  }
  return offset;
}

MultiIndex GridShape::unravel(std::size_t offset) const {
  if (offset >= size_) throw std::out_of_range("GridShape: offset outside grid");
  MultiIndex j(dims_.size());
  for (std::size_t p = 0; p < dims_.size(); ++p) {
    j[p] = static_cast<int>(offset % static_cast<std::size_t>(dims_[p]));
    offset /= static_cast<std::size_t>(dims_[p]);
  }
  return j;
}

SampleMask::SampleMask(GridShape shape, std::vector<MultiIndex> indices)
    : shape_(std::move(shape)) {
  std::vector<std::pair<std::size_t, MultiIndex>> keyed;
  keyed.reserve(indices.size());
  for (auto& j : indices) {
    if (!shape_.contains(j)) {
      throw std::out_of_range("SampleMask: index outside grid");
    }
    keyed.emplace_back(shape_.linear(j), std::move(j));
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  for (std::size_t i = 1; i < keyed.size(); ++i) {
    if (keyed[i].first == keyed[i - 1].first) {
      throw std::invalid_argument("SampleMask: duplicate index");
    }
  }
  for (auto& [offset, j] : keyed) {
    offsets_.push_back(offset);
    indices_.push_back(std::move(j));
  }
}

SampleMask SampleMask::full(const GridShape& shape) {
  std::vector<MultiIndex> all;
  all.reserve(shape.size());
  for (std::size_t o = 0; o < shape.size(); ++o) all.push_back(shape.unravel(o));
  return SampleMask(shape, std::move(all));
}

std::optional<std::size_t> SampleMask::find(std::size_t offset) const {
  auto it = std::lower_bound(offsets_.begin(), offsets_.end(), offset);
  if (it == offsets_.end() || *it != offset) return std::nullopt;
  return static_cast<std::size_t>(it - offsets_.begin());
}

SpectralSignal::SpectralSignal(int dimension, std::vector<Pole> poles)
    : dimension_(dimension), poles_(std::move(poles)) {
  if (dimension_ < 1) throw std::invalid_argument("SpectralSignal: dimension must be >= 1");
  for (const auto& pole : poles_) {
    if (static_cast<int>(pole.freq.size()) != dimension_) {
      throw std::invalid_argument("SpectralSignal: frequency dimension mismatch");
    }
    for (double f : pole.freq) {
      if (!(f >= 0.0 && f < 1.0)) {
        throw std::invalid_argument("SpectralSignal: frequency outside [0,1)");
      }
    }
    if (!(std::abs(pole.coeff) > 0.0)) {
      throw std::invalid_argument("SpectralSignal: coefficient must be nonzero");
    }
  }
}

double SpectralSignal::amplitude_sum() const {
  double total = 0.0;
  for (const auto& pole : poles_) total += std::abs(pole.coeff);
  return total;
}

SpectralSignal SpectralSignal::operator+(const SpectralSignal& other) const {
  if (other.dimension_ != dimension_) {
    throw std::invalid_argument("SpectralSignal: dimension mismatch");
  }
  std::vector<Pole> merged = poles_;
  merged.insert(merged.end(), other.poles_.begin(), other.poles_.end());
  return SpectralSignal(dimension_, std::move(merged));
}

SpectralSignal SpectralSignal::scaled(Complex alpha) const {
  std::vector<Pole> out = poles_;
  for (auto& pole : out) pole.coeff *= alpha;
  return SpectralSignal(dimension_, std::move(out));
}

TensorSamples TensorSamples::dense(GridShape shape, std::vector<Complex> values) {
  if (values.size() != shape.size()) {
    throw std::invalid_argument("TensorSamples: dense value count must equal grid size");
  }
  TensorSamples t;
  t.shape_ = std::move(shape);
  t.values_ = std::move(values);
  return t;
}

TensorSamples TensorSamples::sparse(SampleMask mask, std::vector<Complex> values) {
  if (values.size() != mask.size()) {
    throw std::invalid_argument("TensorSamples: sparse value count must equal mask size");
  }
  TensorSamples t;
  t.shape_ = mask.shape();
  t.mask_ = std::move(mask);
  t.values_ = std::move(values);
  return t;
}

const SampleMask& TensorSamples::mask() const {
  if (!mask_) throw std::logic_error("TensorSamples: dense tensor has no mask");
  return *mask_;
}

Complex TensorSamples::at(std::span<const int> j) const {
  const std::size_t offset = shape_.linear(j);
  if (!mask_) return values_[offset];
  auto pos = mask_->find(offset);
  return pos ? values_[*pos] : Complex(0.0, 0.0);
}

TensorSamples TensorSamples::to_dense() const {
  if (!mask_) return *this;
  std::vector<Complex> full(shape_.size(), Complex(0.0, 0.0));
  for (std::size_t i = 0; i < values_.size(); ++i) full[mask_->offsets()[i]] = values_[i];
  return dense(shape_, std::move(full));
}

double TensorSamples::norm() const {
  double acc = 0.0;
  for (const auto& v : values_) acc += std::norm(v);
  return std::sqrt(acc);
}

TensorSamples synthesize(const SpectralSignal& signal, const GridShape& shape) {
  if (signal.dimension() != shape.dimension()) {
    throw std::invalid_argument("synthesize: signal and grid dimensions differ");
  }
  const int d = shape.dimension();
  std::vector<Complex> values(shape.size(), Complex(0.0, 0.0));
  for (const auto& pole : signal.poles()) {
    // Per-axis phasors, then a running product over the grid.
    std::vector<std::vector<Complex>> axis(static_cast<std::size_t>(d));
    for (int p = 0; p < d; ++p) {
      auto& row = axis[static_cast<std::size_t>(p)];
      row.resize(static_cast<std::size_t>(shape.extent(p)));
      for (int l = 0; l < shape.extent(p); ++l) {
        row[static_cast<std::size_t>(l)] =
            std::polar(1.0, kTwoPi * pole.freq[static_cast<std::size_t>(p)] * l);
      }
    }
    for (std::size_t o = 0; o < shape.size(); ++o) {
      const MultiIndex l = shape.unravel(o);
      Complex atom = pole.coeff;
      for (int p = 0; p < d; ++p) {
        atom *= axis[static_cast<std::size_t>(p)][static_cast<std::size_t>(l[static_cast<std::size_t>(p)])];
      }
      values[o] += atom;
    }
  }
  return TensorSamples::dense(shape, std::move(values));
}

TensorSamples restrict_to(const TensorSamples& x, const SampleMask& mask) {
  if (!(mask.shape() == x.shape())) {
    throw std::out_of_range("restrict_to: mask grid differs from tensor grid");
  }
  std::vector<Complex> picked;
  picked.reserve(mask.size());
  for (const auto& j : mask.indices()) picked.push_back(x.at(j));
  return TensorSamples::sparse(mask, std::move(picked));
}

std::size_t vec_index(std::span<const int> j, std::span<const int> degree) {
  if (j.size() != degree.size()) {
    throw std::invalid_argument("vec_index: index and degree dimensions differ");
  }
  std::size_t u = 0;
  std::size_t stride = 1;
  for (std::size_t p = 0; p < j.size(); ++p) {
    if (j[p] < 0 || j[p] > degree[p]) {
      throw std::out_of_range("vec_index: component " + std::to_string(p) + " out of range");
    }
    u += static_cast<std::size_t>(j[p]) * stride;
    stride *= static_cast<std::size_t>(degree[p] + 1);
  }
  return u + 1;
}

MultiIndex unvec_index(std::size_t u, std::span<const int> degree) {
  std::size_t total = 1;
  for (int m : degree) total *= static_cast<std::size_t>(m + 1);
  if (u < 1 || u > total) throw std::out_of_range("unvec_index: position out of range");
  std::size_t rest = u - 1;
  MultiIndex j(degree.size());
  for (std::size_t p = 0; p < degree.size(); ++p) {
    const auto span = static_cast<std::size_t>(degree[p] + 1);
    j[p] = static_cast<int>(rest % span);
    rest /= span;
  }
  return j;
}

double inner_real(const TensorSamples& q, const TensorSamples& x) {
  if (!(q.shape() == x.shape()) || q.is_dense() != x.is_dense() ||
      (!q.is_dense() && q.mask().offsets() != x.mask().offsets())) {
    throw std::invalid_argument("inner_real: tensors have different shape or support");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < q.values().size(); ++i) {
    acc += (std::conj(x.values()[i]) * q.values()[i]).real();
  }
  return acc;
}

double wrap_unit(double f) {
  double r = f - std::floor(f);
  return r >= 1.0 ? 0.0 : r;
}

double wrap_distance(std::span<const double> f, std::span<const double> g) {
  if (f.size() != g.size()) throw std::invalid_argument("wrap_distance: dimension mismatch");
  double worst = 0.0;
  for (std::size_t p = 0; p < f.size(); ++p) {
    const double delta = wrap_unit(f[p] - g[p]);
    worst = std::max(worst, std::min(delta, 1.0 - delta));
  }
  return worst;
}

double RandomSource::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::normal() {
  if (spare_normal_) {
    const double z = *spare_normal_;
    spare_normal_.reset();
    return z;
  }
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_normal_ = radius * std::sin(kTwoPi * u2);
  return radius * std::cos(kTwoPi * u2);
}

std::size_t RandomSource::below(std::size_t bound) {
  if (bound == 0) throw std::invalid_argument("RandomSource::below: empty range");
  const std::uint64_t b = bound;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % b;
  std::uint64_t r = engine_();
  while (r >= limit) r = engine_();
  return static_cast<std::size_t>(r % b);
}

Instance random_instance(const GridShape& shape, int sparsity, int observations,
                         double min_separation, AmplitudeLaw law,
                         std::uint64_t seed) {
  if (sparsity < 1) throw std::invalid_argument("random_instance: sparsity must be >= 1");
  if (observations < 0 || static_cast<std::size_t>(observations) > shape.size()) {
    throw std::invalid_argument("random_instance: observation count exceeds grid size");
  }
  if (min_separation < 0.0) {
    throw std::invalid_argument("random_instance: negative separation");
  }
  constexpr int kAttemptCap = 100000;

  RandomSource rng(seed);
  const int d = shape.dimension();
  std::vector<Frequency> freqs;
  int attempts = 0;
  while (static_cast<int>(freqs.size()) < sparsity) {
    if (++attempts > kAttemptCap) {
      throw std::runtime_error("random_instance: separation " + std::to_string(min_separation) +
                               " too large for " + std::to_string(sparsity) + " poles");
    }
    Frequency f(static_cast<std::size_t>(d));
    for (auto& fp : f) fp = rng.uniform();
    const bool separated = std::all_of(freqs.begin(), freqs.end(), [&](const Frequency& g) {
      return wrap_distance(f, g) >= min_separation;
    });
    if (separated) freqs.push_back(std::move(f));
  }

  std::vector<Pole> poles;
  for (auto& f : freqs) {
    const double phase = kTwoPi * rng.uniform();
    double amplitude = 1.0;
    if (law == AmplitudeLaw::kHalfPlusChiSq1) {
      const double z = rng.normal();
      amplitude = 0.5 + z * z;
    }
    poles.push_back({std::move(f), std::polar(amplitude, phase)});
  }

  // Partial Fisher-Yates over linear offsets.
  std::vector<std::size_t> offsets(shape.size());
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  for (std::size_t i = 0; i < static_cast<std::size_t>(observations); ++i) {
    const std::size_t pick = i + rng.below(offsets.size() - i);
    std::swap(offsets[i], offsets[pick]);
  }
  std::vector<MultiIndex> indices;
  for (std::size_t i = 0; i < static_cast<std::size_t>(observations); ++i) {
    indices.push_back(shape.unravel(offsets[i]));
  }

  return Instance{SpectralSignal(d, std::move(poles)), SampleMask(shape, std::move(indices)), seed};
}

}  // namespace atomic_sdp
