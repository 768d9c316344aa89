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

#include <cstdint>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "atomic_sdp/harness.hpp"

namespace {

struct Overrides {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> density;
  std::vector<int> max_degree;
  std::optional<double> tol;
  bool trace = false;
  bool dump_sdp = false;
};

void add_common(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "random seed (first seed for reproduce)");
  cmd->add_option("--out", o.out, "output directory");
  cmd->add_option("--density", o.density, "grid points per axis for peak scans")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--max-degree", o.max_degree, "degree cap, one entry per axis")
      ->delimiter(',');
  cmd->add_option("--tol", o.tol, "solver relative tolerance (absolute is a tenth of it)")
      ->check(CLI::PositiveNumber);
  cmd->add_flag("--trace", o.trace, "write solver_trace.csv");
  cmd->add_flag("--dump-sdp", o.dump_sdp, "write problem_dump.txt");
}

atomic_sdp::RunConfig resolve(const Overrides& o, atomic_sdp::RunConfig config,
                              const std::vector<int>* instance_dims = nullptr) {
  if (!o.config_path.empty()) config = atomic_sdp::load_run_config(o.config_path);
  if (instance_dims) {
    // Instance files carry their own grid; generation fields do not apply.
    config.dims = *instance_dims;
    config.sparsity = 1;
    config.observations = 1;
    config.min_separation = 0.0;
  }
  if (o.seed) config.seed = *o.seed;
  if (o.out) config.output_dir = *o.out;
  if (o.density) config.grid_density.assign(config.dims.size(), *o.density);
  if (!o.max_degree.empty()) {
    config.schedule.cap = o.max_degree;
    if (config.schedule.cap.size() == 1 && config.dims.size() > 1) {
      config.schedule.cap.assign(config.dims.size(), o.max_degree.front());
    }
  }
  if (o.tol) {
    config.solver.rel_tol = *o.tol;
    config.solver.abs_tol = *o.tol / 10.0;
  }
  config.trace = config.trace || o.trace;
  config.dump_sdp = config.dump_sdp || o.dump_sdp;
  config.validate();
  return config;
}

atomic_sdp::RunConfig for_instance(const Overrides& o, const std::string& instance_path) {
  const auto file = atomic_sdp::load_instance(instance_path);
  return resolve(o, atomic_sdp::RunConfig{}, &file.shape.dims());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multidimensional spectral estimation by atomic norm minimization"};
  app.require_subcommand(1);

  Overrides gen_opts, solve_opts, plot_opts, repro_opts;
  std::string solve_instance, plot_instance;

  CLI::App* generate = app.add_subcommand("generate", "write a random instance.json");
  add_common(generate, gen_opts);

  CLI::App* solve = app.add_subcommand("solve", "certify an instance; exit 0 iff certified");
  solve->add_option("instance", solve_instance, "instance JSON")->required();
  add_common(solve, solve_opts);

  CLI::App* dualplot = app.add_subcommand("dualplot", "write dual polynomial modulus CSVs");
  dualplot->add_option("instance", plot_instance, "instance JSON")->required();
  add_common(dualplot, plot_opts);

  CLI::App* reproduce = app.add_subcommand("reproduce", "run the seed batch and the 1-D suite");
  add_common(reproduce, repro_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (generate->parsed()) {
      const auto config = resolve(gen_opts, atomic_sdp::RunConfig{});
      std::cout << atomic_sdp::cmd_generate(config).string() << '\n';
      return atomic_sdp::kExitCertified;
    }
    if (solve->parsed()) {
      return atomic_sdp::cmd_solve(solve_instance, for_instance(solve_opts, solve_instance),
                                   std::cout);
    }
    if (dualplot->parsed()) {
      return atomic_sdp::cmd_dualplot(plot_instance, for_instance(plot_opts, plot_instance),
                                      std::cout);
    }
    const auto config = resolve(repro_opts, atomic_sdp::reproduction_config());
    const auto report = atomic_sdp::cmd_reproduce(config, std::cout);
    return report.certified_count() == static_cast<int>(report.seeds.size())
               ? atomic_sdp::kExitCertified
               : atomic_sdp::kExitUncertified;
  } catch (const atomic_sdp::ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return atomic_sdp::kExitInvalid;
  } catch (const std::invalid_argument& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return atomic_sdp::kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return atomic_sdp::kExitFailure;
  }
}
