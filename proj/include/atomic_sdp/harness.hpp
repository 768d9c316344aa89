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

// End-to-end commands behind the atomic-sdp executable, plus the JSON and
// CSV formats they read and write.

#ifndef ATOMIC_SDP_HARNESS_HPP
#define ATOMIC_SDP_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "atomic_sdp/atomic_dual.hpp"
#include "atomic_sdp/localize_recover.hpp"
#include "atomic_sdp/tensor_signal.hpp"

namespace atomic_sdp {

/// Invalid configuration or instance file. Maps to exit code 2.
class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  std::vector<int> dims{12, 12};
  int sparsity = 8;
  int observations = 60;
  double min_separation = 1.5 / 12.0;
  AmplitudeLaw law = AmplitudeLaw::kHalfPlusChiSq1;
  DegreeSchedule schedule;
  SolverSettings solver = pipeline_solver_settings();
  std::vector<int> grid_density;  // empty: default per degree
  CertifyTolerances tolerances;
  std::uint64_t seed = 1;
  std::filesystem::path output_dir = ".";

  int seeds = 10;           // reproduce: batch size, seeds seed .. seed+seeds-1
  int threads = 0;          // reproduce: 0 picks the hardware concurrency
  int equivalence_runs = 20;
  bool trace = false;       // write the solver iteration log
  bool dump_sdp = false;    // write the first SDP in sparse text form

  void validate() const;
};

RunConfig run_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_run_config(const std::filesystem::path& path);

/// The configuration of the two-dimensional reproduction experiment.
RunConfig reproduction_config();

struct InstanceFile {
  GridShape shape;
  Instance instance;

  /// Noiseless samples of the signal on the mask.
  TensorSamples observations() const;
};

nlohmann::json instance_to_json(const GridShape& shape, const Instance& instance);
InstanceFile instance_from_json(const nlohmann::json& j);
InstanceFile load_instance(const std::filesystem::path& path);

nlohmann::json signal_to_json(const SpectralSignal& signal);
nlohmann::json certificate_to_json(const Certificate& certificate);

/// Recovered model of a certificate as a signal. Empty when no poles.
SpectralSignal recovered_signal(const Certificate& certificate, int dimension);

/// Writes `poles.csv`: kind,f_1..f_d,re,im,modulus with kind in {true, estimate}.
void write_poles_csv(std::ostream& out, const SpectralSignal& truth,
                     const std::vector<Peak>& estimates, const TrigPolynomial& q);

/// Runs the solve pipeline with the configured schedule and tolerances.
EscalationResult solve_instance(const TensorSamples& x_obs, const RunConfig& config);

/// Exit codes shared by the commands.
inline constexpr int kExitCertified = 0;
inline constexpr int kExitUncertified = 1;
inline constexpr int kExitInvalid = 2;
inline constexpr int kExitFailure = 3;

/// Writes `instance.json` into the output directory and returns its path.
std::filesystem::path cmd_generate(const RunConfig& config);

/// Writes `certificate.json` and `recovered.json`; on failure writes
/// `error.json`. Returns an exit code.
int cmd_solve(const std::filesystem::path& instance_path, const RunConfig& config,
              std::ostream& log);

/// Writes `dual_modulus.csv` and `poles.csv`. Returns an exit code.
int cmd_dualplot(const std::filesystem::path& instance_path, const RunConfig& config,
                 std::ostream& log);

struct SeedReport {
  std::uint64_t seed = 0;
  bool certified = false;
  double max_pole_error = 0.0;   // wrap-around l-infinity, true pole to nearest estimate
  double min_true_modulus = 0.0; // |<q*, a(f_j, 0)>| minimized over true poles
  double gap = 0.0;
  double relative_gap = 0.0;     // gap / max(1, p_m_dual)
  double p_m_dual = 0.0;
  double p_primal_f = 0.0;
  std::size_t estimated_poles = 0;
  double seconds = 0.0;
  std::string error;             // non-empty when the run threw
};

struct EquivalenceReport {
  std::uint64_t seed = 0;
  int sparsity = 0;
  double dual_value = 0.0;
  double primal_value = 0.0;
  double discrepancy = 0.0;  // |dual - primal| / (1 + |primal|)
};

struct ReproduceReport {
  std::vector<SeedReport> seeds;
  std::vector<EquivalenceReport> equivalence;
  double max_equivalence_discrepancy = 0.0;
  int certified_count() const;
};

SeedReport run_seed(const RunConfig& config, std::uint64_t seed);

/// One-dimensional cross-check of the restricted dual against the Toeplitz
/// primal: n = 8, m = 6, s cycling through 1..3, separation 1/8.
std::vector<EquivalenceReport> run_equivalence_suite(int runs, std::uint64_t first_seed,
                                                     const SolverSettings& settings);

/// Batch over seeds in worker threads, plus the equivalence suite. Writes
/// `reproduce_summary.csv`, `equivalence.csv` and per-seed certificates.
ReproduceReport cmd_reproduce(const RunConfig& config, std::ostream& log);

}  // namespace atomic_sdp

#endif  // ATOMIC_SDP_HARNESS_HPP
