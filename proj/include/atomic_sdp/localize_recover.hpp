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

#ifndef ATOMIC_SDP_LOCALIZE_RECOVER_HPP
#define ATOMIC_SDP_LOCALIZE_RECOVER_HPP

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "atomic_sdp/conic.hpp"
#include "atomic_sdp/tensor_signal.hpp"
#include "atomic_sdp/trig_polynomial.hpp"

namespace atomic_sdp {

struct LocalizeOptions {
  /// Per-axis scan density; empty selects default_grid_density(degree).
  std::vector<int> grid_density;
  /// A refined peak is reported when its modulus reaches this value.
  double peak_threshold = 0.99;
  /// Grid local maxima at or above this modulus seed a Newton refinement.
  /// It sits below peak_threshold because a pole between grid nodes can
  /// read well under its true modulus on the grid.
  double seed_threshold = 0.5;
  int newton_max_iterations = 50;
  double gradient_tol = 1e-12;
};

struct Peak {
  Frequency freq;
  double modulus = 0.0;
  /// False when Newton did not converge and the grid point was kept.
  bool refined = true;
};

/// Unit-modulus points of the dual polynomial, sorted lexicographically.
std::vector<Peak> locate_peaks(const TrigPolynomial& q, const LocalizeOptions& options = {});

std::vector<Frequency> peak_frequencies(const std::vector<Peak>& peaks);

struct CoefficientFit {
  std::vector<Complex> coeffs;
  std::vector<Complex> residual;  // x_obs - A c on the mask
  double residual_norm = 0.0;
  double condition_number = 1.0;
};

/// Raised when two localized frequencies make the Vandermonde system
/// numerically singular.
class RankDeficientError : public std::runtime_error {
 public:
  RankDeficientError(const std::string& what, std::size_t first, std::size_t second)
      : std::runtime_error(what), pair_(first, second) {}
  std::pair<std::size_t, std::size_t> offending_pair() const { return pair_; }

 private:
  std::pair<std::size_t, std::size_t> pair_;
};

/// Least-squares coefficients for x_obs[l] = sum_j c_j exp(i 2 pi f_j^T l)
/// over the observed indices.
CoefficientFit recover_coeffs(const std::vector<Frequency>& freqs, const TensorSamples& x_obs);

/// Atomic-norm bound of an observation misfit r supported on the mask:
/// (1/|N|) sum over the DFT grid of |sum_l r_l exp(-i 2 pi f^T l)|, the cost
/// of absorbing r with on-grid atoms.
double misfit_atomic_bound(const std::vector<Complex>& residual, const SampleMask& mask);

struct CertifyTolerances {
  double certification = 1e-3;  // relative to max(1, p_m_dual)
  double fit = 1e-6;            // relative to the observation norm
};

enum class Verdict { kCertified, kUncertified };
const char* to_string(Verdict verdict);

struct EscalationStep {
  DegreeVector degree;
  double p_m_dual = 0.0;
  double p_primal_f = 0.0;
  double gap = 0.0;
  Verdict verdict = Verdict::kUncertified;
  std::size_t poles = 0;
  SolveStatus solver_status = SolveStatus::kMaxIterations;
  int iterations = 0;
  double seconds = 0.0;
};

/// Weak-duality bracket [p_m_dual, p_primal_f] around the minimum atomic
/// norm, with the recovered model that realizes the upper end.
struct Certificate {
  double p_m_dual = 0.0;
  /// sum_j |c_j| plus misfit_atomic_bound of the fit residual; the residual
  /// term vanishes when the model reproduces the observations exactly.
  double p_primal_f = 0.0;
  double gap = 0.0;
  double coefficient_sum = 0.0;
  double misfit_bound = 0.0;
  double residual = 0.0;
  double condition_number = 1.0;
  std::vector<Frequency> frequencies;
  std::vector<Complex> coefficients;
  Verdict verdict = Verdict::kUncertified;
  DegreeVector degree;
  std::vector<EscalationStep> history;

  bool certified() const { return verdict == Verdict::kCertified; }
};

/// Thrown when p_primal_f falls below p_m_dual by more than the
/// certification tolerance, which weak duality forbids.
class ConsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Certificate certify(double p_m_dual, std::vector<Frequency> freqs, const CoefficientFit& fit,
                    const TensorSamples& x_obs, const CertifyTolerances& tolerances = {});

}  // namespace atomic_sdp

#endif  // ATOMIC_SDP_LOCALIZE_RECOVER_HPP
