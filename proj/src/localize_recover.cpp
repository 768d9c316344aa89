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

#include "atomic_sdp/localize_recover.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

namespace atomic_sdp {
namespace {

double modulus_at(const TrigPolynomial& q, std::span<const double> f) {
  return std::abs(eval_dual_poly(q, f));
}

void wrap_in_place(Frequency& f) {
  for (double& fp : f) fp = wrap_unit(fp);
}

// Damped Newton ascent on |P(f)|^2 from a grid seed.
Peak refine(const TrigPolynomial& q, Frequency seed, const LocalizeOptions& options) {
  const double seed_modulus = modulus_at(q, seed);
  Frequency f = seed;
  ModulusDerivatives g = squared_modulus_derivatives(q, f);
  bool converged = false;
  for (int it = 0; it < options.newton_max_iterations; ++it) {
    if (g.gradient.norm() <= options.gradient_tol) {
      converged = true;
      break;
    }
    Eigen::VectorXd direction;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g.hessian);
    if (eig.info() == Eigen::Success && eig.eigenvalues().maxCoeff() < 0.0) {
      direction = -eig.eigenvectors() *
                  (eig.eigenvalues().cwiseInverse().asDiagonal() *
                   (eig.eigenvectors().transpose() * g.gradient));
    } else {
      const double curvature = std::max(g.hessian.cwiseAbs().maxCoeff(), 1.0);
      direction = g.gradient / curvature;
    }

    double step = 1.0;
    bool accepted = false;
    Frequency trial(f.size());
    ModulusDerivatives trial_g;
    while (step > 1e-12) {
      for (std::size_t p = 0; p < f.size(); ++p) {
        trial[p] = f[p] + step * direction(static_cast<Eigen::Index>(p));
      }
      wrap_in_place(trial);
      trial_g = squared_modulus_derivatives(q, trial);
      if (trial_g.value >= g.value) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // No representable ascent left: stationary to machine precision.
      converged = direction.norm() < 1e-10;
      break;
    }
    const double moved = step * direction.norm();
    f = trial;
    g = std::move(trial_g);
    if (moved < 1e-15) {
      converged = true;
      break;
    }
  }
  if (g.gradient.norm() <= options.gradient_tol) converged = true;

  Peak peak;
  if (converged && std::sqrt(g.value) >= seed_modulus) {
    peak.freq = std::move(f);
    peak.modulus = std::sqrt(g.value);
    peak.refined = true;
  } else {
    peak.freq = std::move(seed);
    peak.modulus = seed_modulus;
    peak.refined = false;
  }
  return peak;
}

bool is_local_max(const ModulusGrid& grid, std::size_t offset) {
  const std::size_t d = grid.density.size();
  std::vector<int> t(d);
  std::size_t rest = offset;
  for (std::size_t p = 0; p < d; ++p) {
    t[p] = static_cast<int>(rest % static_cast<std::size_t>(grid.density[p]));
    rest /= static_cast<std::size_t>(grid.density[p]);
  }
  const double centre = grid.modulus[offset];
  std::size_t neighbours = 1;
  for (std::size_t p = 0; p < d; ++p) neighbours *= 3;
  for (std::size_t code = 0; code < neighbours; ++code) {
    std::size_t c = code;
    std::size_t neighbour = 0;
    std::size_t stride = 1;
    bool self = true;
    for (std::size_t p = 0; p < d; ++p) {
      const int shift = static_cast<int>(c % 3) - 1;
      c /= 3;
      self = self && shift == 0;
      const int n = grid.density[p];
      const int coord = ((t[p] + shift) % n + n) % n;
      neighbour += static_cast<std::size_t>(coord) * stride;
      stride *= static_cast<std::size_t>(n);
    }
    if (!self && grid.modulus[neighbour] > centre) return false;
  }
  return true;
}

}  // namespace

std::vector<Peak> locate_peaks(const TrigPolynomial& q, const LocalizeOptions& options) {
  std::vector<int> density = options.grid_density;
  if (density.empty()) density = default_grid_density(q.degree());
  const ModulusGrid grid = grid_modulus(q, density);

  std::vector<Peak> candidates;
  for (std::size_t o = 0; o < grid.modulus.size(); ++o) {
    if (grid.modulus[o] < options.seed_threshold) continue;
    if (!is_local_max(grid, o)) continue;
    Peak peak = refine(q, grid.point(o), options);
    if (peak.modulus >= options.peak_threshold) candidates.push_back(std::move(peak));
  }

  // Merge peaks closer than one grid cell, strongest first.
  const double radius = 1.0 / static_cast<double>(*std::min_element(density.begin(), density.end()));
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Peak& a, const Peak& b) { return a.modulus > b.modulus; });
  std::vector<Peak> kept;
  for (auto& candidate : candidates) {
    const bool duplicate = std::any_of(kept.begin(), kept.end(), [&](const Peak& k) {
      return wrap_distance(k.freq, candidate.freq) < radius;
    });
    if (!duplicate) kept.push_back(std::move(candidate));
  }
  std::sort(kept.begin(), kept.end(),
            [](const Peak& a, const Peak& b) { return a.freq < b.freq; });
  return kept;
}

std::vector<Frequency> peak_frequencies(const std::vector<Peak>& peaks) {
  std::vector<Frequency> out;
  out.reserve(peaks.size());
  for (const auto& peak : peaks) out.push_back(peak.freq);
  return out;
}

CoefficientFit recover_coeffs(const std::vector<Frequency>& freqs, const TensorSamples& x_obs) {
  const SampleMask mask = x_obs.is_dense() ? SampleMask::full(x_obs.shape()) : x_obs.mask();
  const auto m = static_cast<Eigen::Index>(mask.size());
  const auto t = static_cast<Eigen::Index>(freqs.size());
  if (t < 1) throw std::invalid_argument("recover_coeffs: no frequencies");
  if (t > m) throw std::invalid_argument("recover_coeffs: more frequencies than observations");
  const int d = x_obs.shape().dimension();
  for (const auto& f : freqs) {
    if (static_cast<int>(f.size()) != d) {
      throw std::invalid_argument("recover_coeffs: frequency dimension mismatch");
    }
  }

  Eigen::MatrixXcd system(m, t);
  Eigen::VectorXcd rhs(m);
  for (Eigen::Index r = 0; r < m; ++r) {
    const MultiIndex& l = mask.indices()[static_cast<std::size_t>(r)];
    rhs(r) = x_obs.values()[static_cast<std::size_t>(r)];
    for (Eigen::Index c = 0; c < t; ++c) {
      double phase = 0.0;
      for (int p = 0; p < d; ++p) {
        phase += freqs[static_cast<std::size_t>(c)][static_cast<std::size_t>(p)] *
                 l[static_cast<std::size_t>(p)];
      }
      system(r, c) = std::polar(1.0, kTwoPi * phase);
    }
  }

  Eigen::BDCSVD<Eigen::MatrixXcd> svd(system, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (!(smin > 1e-10 * smax)) {
    std::size_t first = 0, second = 1;
    double worst = -1.0;
    for (Eigen::Index a = 0; a < t; ++a) {
      for (Eigen::Index b = a + 1; b < t; ++b) {
        const double coherence = std::abs(system.col(a).dot(system.col(b))) / static_cast<double>(m);
        if (coherence > worst) {
          worst = coherence;
          first = static_cast<std::size_t>(a);
          second = static_cast<std::size_t>(b);
        }
      }
    }
    throw RankDeficientError("recover_coeffs: frequencies " + std::to_string(first) + " and " +
                                 std::to_string(second) + " are numerically indistinguishable",
                             first, second);
  }

  const Eigen::VectorXcd c = svd.solve(rhs);
  const Eigen::VectorXcd r = rhs - system * c;
  CoefficientFit fit;
  fit.coeffs.assign(c.data(), c.data() + c.size());
  fit.residual.assign(r.data(), r.data() + r.size());
  fit.residual_norm = r.norm();
  fit.condition_number = smax / smin;
  return fit;
}

double misfit_atomic_bound(const std::vector<Complex>& residual, const SampleMask& mask) {
  if (residual.size() != mask.size()) {
    throw std::invalid_argument("misfit_atomic_bound: residual size differs from mask size");
  }
  const GridShape& shape = mask.shape();
  const int d = shape.dimension();
  double total = 0.0;
  for (std::size_t o = 0; o < shape.size(); ++o) {
    const MultiIndex k = shape.unravel(o);
    Complex acc(0.0, 0.0);
    for (std::size_t i = 0; i < residual.size(); ++i) {
      const MultiIndex& l = mask.indices()[i];
      double phase = 0.0;
      for (int p = 0; p < d; ++p) {
        const auto pp = static_cast<std::size_t>(p);
        phase += static_cast<double>((static_cast<long>(k[pp]) * l[pp]) % shape.extent(p)) /
                 shape.extent(p);
      }
      acc += residual[i] * std::polar(1.0, -kTwoPi * phase);
    }
    total += std::abs(acc);
  }
  return total / static_cast<double>(shape.size());
}

const char* to_string(Verdict verdict) {
  return verdict == Verdict::kCertified ? "certified" : "uncertified";
}

Certificate certify(double p_m_dual, std::vector<Frequency> freqs, const CoefficientFit& fit,
                    const TensorSamples& x_obs, const CertifyTolerances& tolerances) {
  if (fit.coeffs.size() != freqs.size()) {
    throw std::invalid_argument("certify: coefficient and frequency counts differ");
  }
  const SampleMask mask = x_obs.is_dense() ? SampleMask::full(x_obs.shape()) : x_obs.mask();

  Certificate cert;
  cert.p_m_dual = p_m_dual;
  cert.frequencies = std::move(freqs);
  cert.coefficients = fit.coeffs;
  cert.residual = fit.residual_norm;
  cert.condition_number = fit.condition_number;
  for (const auto& c : fit.coeffs) cert.coefficient_sum += std::abs(c);
  cert.misfit_bound = fit.residual.empty() ? 0.0 : misfit_atomic_bound(fit.residual, mask);
  cert.p_primal_f = cert.coefficient_sum + cert.misfit_bound;
  cert.gap = cert.p_primal_f - cert.p_m_dual;

  const double gap_tol = tolerances.certification * std::max(1.0, std::abs(p_m_dual));
  if (cert.gap < -gap_tol) {
    throw ConsistencyError("certify: feasible primal value " + std::to_string(cert.p_primal_f) +
                           " is below the restricted dual value " + std::to_string(p_m_dual));
  }
  const double fit_tol = tolerances.fit * x_obs.norm();
  cert.verdict = (cert.gap <= gap_tol && cert.residual <= fit_tol) ? Verdict::kCertified
                                                                    : Verdict::kUncertified;
  return cert;
}

}  // namespace atomic_sdp
