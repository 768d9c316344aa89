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

#include "atomic_sdp/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

namespace atomic_sdp {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

const char* law_name(AmplitudeLaw law) {
  return law == AmplitudeLaw::kUnit ? "unit" : "half_plus_chi2";
}

AmplitudeLaw parse_law(const std::string& name) {
  if (name == "unit") return AmplitudeLaw::kUnit;
  if (name == "half_plus_chi2") return AmplitudeLaw::kHalfPlusChiSq1;
  throw ValidationError("unknown amplitude_law '" + name + "'");
}

void reject_unknown(const json& j, std::initializer_list<const char*> known, const char* where) {
  if (!j.is_object()) throw ValidationError(std::string(where) + ": expected an object");
  const std::set<std::string> allowed(known.begin(), known.end());
  for (const auto& item : j.items()) {
    if (!allowed.contains(item.key())) {
      throw ValidationError(std::string(where) + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void read_if(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

json frequency_json(const Frequency& f) { return json(f); }

json poles_json(const std::vector<Frequency>& freqs, const std::vector<Complex>& coeffs) {
  json out = json::array();
  for (std::size_t i = 0; i < freqs.size(); ++i) {
    out.push_back({{"freq", frequency_json(freqs[i])},
                   {"re", coeffs[i].real()},
                   {"im", coeffs[i].imag()}});
  }
  return out;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << std::setprecision(17);
  return out;
}

void ensure_directory(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
}

void write_error(const fs::path& dir, const std::string& kind, const std::string& message) {
  try {
    ensure_directory(dir);
    write_json(dir / "error.json", {{"error", kind}, {"message", message}});
  } catch (const std::exception&) {
    // The diagnostic is best effort; the exit code still reports the failure.
  }
}

LocalizeOptions localize_options(const RunConfig& config) {
  LocalizeOptions options;
  options.grid_density = config.grid_density;
  return options;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void RunConfig::validate() const {
  if (dims.empty()) throw ValidationError("dims must not be empty");
  std::size_t total = 1;
  for (int n : dims) {
    if (n <= 0) throw ValidationError("dims must be positive");
    total *= static_cast<std::size_t>(n);
  }
  if (sparsity <= 0) throw ValidationError("sparsity must be positive");
  if (observations <= 0) throw ValidationError("observations must be positive");
  if (static_cast<std::size_t>(observations) > total) {
    throw ValidationError("observations exceed the grid size");
  }
  if (!(min_separation >= 0.0 && min_separation < 0.5)) {
    throw ValidationError("min_separation must lie in [0, 0.5)");
  }
  const std::size_t d = dims.size();
  for (const auto* v : {&schedule.start, &schedule.increment, &schedule.cap, &grid_density}) {
    if (!v->empty() && v->size() != d) {
      throw ValidationError("per-axis lists must have one entry per dimension");
    }
  }
  for (std::size_t p = 0; p < schedule.start.size(); ++p) {
    if (schedule.start[p] < dims[p] - 1) throw ValidationError("start degree below n_p - 1");
  }
  for (std::size_t p = 0; p < schedule.cap.size(); ++p) {
    if (schedule.cap[p] < dims[p] - 1) throw ValidationError("degree cap below n_p - 1");
  }
  for (int v : schedule.increment) {
    if (v < 0) throw ValidationError("degree increment must be non-negative");
  }
  for (int v : grid_density) {
    if (v <= 0) throw ValidationError("grid density must be positive");
  }
  if (!(tolerances.certification > 0.0) || !(tolerances.fit > 0.0)) {
    throw ValidationError("certificate tolerances must be positive");
  }
  if (seeds <= 0) throw ValidationError("seeds must be positive");
  if (threads < 0) throw ValidationError("threads must be non-negative");
  if (equivalence_runs < 0) throw ValidationError("equivalence_runs must be non-negative");
  try {
    solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ValidationError(e.what());
  }
}

RunConfig run_config_from_json(const json& j) {
  RunConfig c;
  try {
    reject_unknown(j,
                   {"dims", "sparsity", "observations", "min_separation", "amplitude_law",
                    "degree_schedule", "solver", "grid_density", "tolerances", "seed",
                    "output_dir", "seeds", "threads", "equivalence_runs", "trace", "dump_sdp"},
                   "config");
    read_if(j, "dims", c.dims);
    read_if(j, "sparsity", c.sparsity);
    read_if(j, "observations", c.observations);
    read_if(j, "min_separation", c.min_separation);
    if (j.contains("amplitude_law")) c.law = parse_law(j.at("amplitude_law").get<std::string>());
    if (j.contains("degree_schedule")) {
      const json& s = j.at("degree_schedule");
      reject_unknown(s, {"start", "increment", "cap"}, "degree_schedule");
      read_if(s, "start", c.schedule.start);
      read_if(s, "increment", c.schedule.increment);
      read_if(s, "cap", c.schedule.cap);
    }
    if (j.contains("solver")) {
      const json& s = j.at("solver");
      reject_unknown(s,
                     {"abs_tol", "rel_tol", "max_iterations", "relaxation", "rho",
                      "adaptive_rho", "infeasibility_check_period", "infeasibility_tol"},
                     "solver");
      read_if(s, "abs_tol", c.solver.abs_tol);
      read_if(s, "rel_tol", c.solver.rel_tol);
      read_if(s, "max_iterations", c.solver.max_iterations);
      read_if(s, "relaxation", c.solver.relaxation);
      read_if(s, "rho", c.solver.rho);
      read_if(s, "adaptive_rho", c.solver.adaptive_rho);
      read_if(s, "infeasibility_check_period", c.solver.infeasibility_check_period);
      read_if(s, "infeasibility_tol", c.solver.infeasibility_tol);
    }
    read_if(j, "grid_density", c.grid_density);
    if (j.contains("tolerances")) {
      const json& t = j.at("tolerances");
      reject_unknown(t, {"certification", "fit"}, "tolerances");
      read_if(t, "certification", c.tolerances.certification);
      read_if(t, "fit", c.tolerances.fit);
    }
    read_if(j, "seed", c.seed);
    if (j.contains("output_dir")) c.output_dir = j.at("output_dir").get<std::string>();
    read_if(j, "seeds", c.seeds);
    read_if(j, "threads", c.threads);
    read_if(j, "equivalence_runs", c.equivalence_runs);
    read_if(j, "trace", c.trace);
    read_if(j, "dump_sdp", c.dump_sdp);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

json to_json(const RunConfig& c) {
  return {{"dims", c.dims},
          {"sparsity", c.sparsity},
          {"observations", c.observations},
          {"min_separation", c.min_separation},
          {"amplitude_law", law_name(c.law)},
          {"degree_schedule",
           {{"start", c.schedule.start},
            {"increment", c.schedule.increment},
            {"cap", c.schedule.cap}}},
          {"solver",
           {{"abs_tol", c.solver.abs_tol},
            {"rel_tol", c.solver.rel_tol},
            {"max_iterations", c.solver.max_iterations},
            {"relaxation", c.solver.relaxation},
            {"rho", c.solver.rho},
            {"adaptive_rho", c.solver.adaptive_rho},
            {"infeasibility_check_period", c.solver.infeasibility_check_period},
            {"infeasibility_tol", c.solver.infeasibility_tol}}},
          {"grid_density", c.grid_density},
          {"tolerances",
           {{"certification", c.tolerances.certification}, {"fit", c.tolerances.fit}}},
          {"seed", c.seed},
          {"output_dir", c.output_dir.string()},
          {"seeds", c.seeds},
          {"threads", c.threads},
          {"equivalence_runs", c.equivalence_runs},
          {"trace", c.trace},
          {"dump_sdp", c.dump_sdp}};
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("config " + path.string() + ": " + e.what());
  }
  return run_config_from_json(j);
}

RunConfig reproduction_config() {
  RunConfig c;
  c.schedule.start = {11, 11};
  return c;
}

TensorSamples InstanceFile::observations() const {
  return restrict_to(synthesize(instance.signal, shape), instance.mask);
}

json instance_to_json(const GridShape& shape, const Instance& instance) {
  std::vector<Frequency> freqs;
  std::vector<Complex> coeffs;
  for (const auto& pole : instance.signal.poles()) {
    freqs.push_back(pole.freq);
    coeffs.push_back(pole.coeff);
  }
  return {{"dims", shape.dims()},
          {"poles", poles_json(freqs, coeffs)},
          {"mask", instance.mask.indices()},
          {"seed", instance.seed}};
}

InstanceFile instance_from_json(const json& j) {
  InstanceFile file;
  try {
    reject_unknown(j, {"dims", "poles", "mask", "seed"}, "instance");
    file.shape = GridShape(j.at("dims").get<std::vector<int>>());
    std::vector<Pole> poles;
    for (const json& p : j.at("poles")) {
      reject_unknown(p, {"freq", "re", "im"}, "pole");
      poles.push_back({p.at("freq").get<Frequency>(),
                       Complex(p.at("re").get<double>(), p.at("im").get<double>())});
    }
    file.instance.signal = SpectralSignal(file.shape.dimension(), std::move(poles));
    auto indices = j.at("mask").get<std::vector<MultiIndex>>();
    if (indices.empty()) throw ValidationError("instance: observation mask is empty");
    file.instance.mask = SampleMask(file.shape, std::move(indices));
    read_if(j, "seed", file.instance.seed);
  } catch (const json::exception& e) {
    throw ValidationError(std::string("instance: ") + e.what());
  } catch (const std::logic_error& e) {
    throw ValidationError(std::string("instance: ") + e.what());
  }
  return file;
}

InstanceFile load_instance(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot read instance " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ValidationError("instance " + path.string() + ": " + e.what());
  }
  return instance_from_json(j);
}

json signal_to_json(const SpectralSignal& signal) {
  std::vector<Frequency> freqs;
  std::vector<Complex> coeffs;
  for (const auto& pole : signal.poles()) {
    freqs.push_back(pole.freq);
    coeffs.push_back(pole.coeff);
  }
  return {{"dimension", signal.dimension()},
          {"poles", poles_json(freqs, coeffs)},
          {"amplitude_sum", signal.amplitude_sum()}};
}

json certificate_to_json(const Certificate& cert) {
  json history = json::array();
  for (const auto& step : cert.history) {
    history.push_back({{"degree", step.degree},
                       {"p_m_dual", step.p_m_dual},
                       {"p_primal_f", step.p_primal_f},
                       {"gap", step.gap},
                       {"verdict", to_string(step.verdict)},
                       {"poles", step.poles},
                       {"solver_status", to_string(step.solver_status)},
                       {"iterations", step.iterations},
                       {"seconds", step.seconds}});
  }
  return {{"p_m_dual", cert.p_m_dual},
          {"p_primal_f", cert.p_primal_f},
          {"gap", cert.gap},
          {"verdict", to_string(cert.verdict)},
          {"residual", cert.residual},
          {"coefficient_sum", cert.coefficient_sum},
          {"misfit_bound", cert.misfit_bound},
          {"condition_number", cert.condition_number},
          {"poles", poles_json(cert.frequencies, cert.coefficients)},
          {"degree", cert.degree},
          {"history", history}};
}

SpectralSignal recovered_signal(const Certificate& cert, int dimension) {
  std::vector<Pole> poles;
  for (std::size_t i = 0; i < cert.frequencies.size(); ++i) {
    if (cert.coefficients[i] == Complex(0.0, 0.0)) continue;
    poles.push_back({cert.frequencies[i], cert.coefficients[i]});
  }
  return SpectralSignal(dimension, std::move(poles));
}

void write_poles_csv(std::ostream& out, const SpectralSignal& truth,
                     const std::vector<Peak>& estimates, const TrigPolynomial& q) {
  const int d = q.dimension();
  out << std::setprecision(17) << "kind";
  for (int p = 1; p <= d; ++p) out << ",f_" << p;
  out << ",re,im,modulus\n";
  for (const auto& pole : truth.poles()) {
    out << "true";
    for (double f : pole.freq) out << ',' << f;
    out << ',' << pole.coeff.real() << ',' << pole.coeff.imag() << ','
        << std::abs(eval_dual_poly(q, pole.freq)) << '\n';
  }
  for (const auto& peak : estimates) {
    out << "estimate";
    for (double f : peak.freq) out << ',' << f;
    out << ",,," << peak.modulus << '\n';
  }
}

EscalationResult solve_instance(const TensorSamples& x_obs, const RunConfig& config) {
  return escalate_degree(x_obs, config.schedule, config.solver, localize_options(config),
                         config.tolerances);
}

fs::path cmd_generate(const RunConfig& config) {
  config.validate();
  const GridShape shape(config.dims);
  const Instance instance = random_instance(shape, config.sparsity, config.observations,
                                            config.min_separation, config.law, config.seed);
  ensure_directory(config.output_dir);
  const fs::path path = config.output_dir / "instance.json";
  write_json(path, instance_to_json(shape, instance));
  return path;
}

namespace {

// Shared front half of solve and dualplot: load, validate, optional dumps, solve.
EscalationResult run_pipeline(const InstanceFile& file, const RunConfig& config) {
  const TensorSamples x_obs = file.observations();
  ensure_directory(config.output_dir);
  if (config.dump_sdp) {
    DegreeVector start = config.schedule.start.empty() ? minimal_degree(file.shape)
                                                       : config.schedule.start;
    std::ofstream out = open_output(config.output_dir / "problem_dump.txt");
    write_problem_dump(out, build_dual_sdp(x_obs, start).problem);
  }
  RunConfig run = config;
  std::ofstream trace;
  if (config.trace) {
    trace = open_output(config.output_dir / "solver_trace.csv");
    run.solver.trace = &trace;
  }
  return solve_instance(x_obs, run);
}

template <typename Body>
int guarded(const RunConfig& config, std::ostream& log, Body&& body) {
  try {
    return body();
  } catch (const ValidationError& e) {
    log << "validation error: " << e.what() << '\n';
    write_error(config.output_dir, "validation", e.what());
    return kExitInvalid;
  } catch (const std::invalid_argument& e) {
    log << "validation error: " << e.what() << '\n';
    write_error(config.output_dir, "validation", e.what());
    return kExitInvalid;
  } catch (const std::exception& e) {
    log << "failure: " << e.what() << '\n';
    write_error(config.output_dir, "failure", e.what());
    return kExitFailure;
  }
}

}  // namespace

int cmd_solve(const fs::path& instance_path, const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    config.validate();
    const InstanceFile file = load_instance(instance_path);
    const EscalationResult result = run_pipeline(file, config);
    const Certificate& cert = result.certificate;
    write_json(config.output_dir / "certificate.json", certificate_to_json(cert));
    write_json(config.output_dir / "recovered.json",
               signal_to_json(recovered_signal(cert, file.shape.dimension())));
    log << std::setprecision(17) << to_string(cert.verdict) << " p_m_dual=" << cert.p_m_dual
        << " p_primal_f=" << cert.p_primal_f << " gap=" << cert.gap
        << " residual=" << cert.residual << " poles=" << cert.frequencies.size() << '\n';
    return cert.certified() ? kExitCertified : kExitUncertified;
  });
}

int cmd_dualplot(const fs::path& instance_path, const RunConfig& config, std::ostream& log) {
  return guarded(config, log, [&] {
    config.validate();
    const InstanceFile file = load_instance(instance_path);
    const EscalationResult result = run_pipeline(file, config);
    const TrigPolynomial& q = result.dual.q_star;
    const std::vector<int> density =
        config.grid_density.empty() ? default_grid_density(q.degree()) : config.grid_density;
    {
      std::ofstream out = open_output(config.output_dir / "dual_modulus.csv");
      write_modulus_csv(out, grid_modulus(q, density));
    }
    {
      std::ofstream out = open_output(config.output_dir / "poles.csv");
      write_poles_csv(out, file.instance.signal, result.peaks, q);
    }
    log << "wrote dual_modulus.csv and poles.csv (" << result.peaks.size() << " peaks)\n";
    return kExitCertified;
  });
}

int ReproduceReport::certified_count() const {
  return static_cast<int>(
      std::count_if(seeds.begin(), seeds.end(), [](const SeedReport& r) { return r.certified; }));
}

SeedReport run_seed(const RunConfig& config, std::uint64_t seed) {
  SeedReport report;
  report.seed = seed;
  const auto started = std::chrono::steady_clock::now();
  try {
    const GridShape shape(config.dims);
    const Instance instance = random_instance(shape, config.sparsity, config.observations,
                                              config.min_separation, config.law, seed);
    const TensorSamples x_obs = restrict_to(synthesize(instance.signal, shape), instance.mask);
    const EscalationResult result = solve_instance(x_obs, config);
    const Certificate& cert = result.certificate;
    report.certified = cert.certified();
    report.gap = cert.gap;
    report.relative_gap = cert.gap / std::max(1.0, std::abs(cert.p_m_dual));
    report.p_m_dual = cert.p_m_dual;
    report.p_primal_f = cert.p_primal_f;
    report.estimated_poles = cert.frequencies.size();
    report.min_true_modulus = std::numeric_limits<double>::infinity();
    for (const auto& pole : instance.signal.poles()) {
      double nearest = std::numeric_limits<double>::infinity();
      for (const auto& f : cert.frequencies) nearest = std::min(nearest, wrap_distance(pole.freq, f));
      report.max_pole_error = std::max(report.max_pole_error, nearest);
      report.min_true_modulus = std::min(report.min_true_modulus,
                                         std::abs(eval_dual_poly(result.dual.q_star, pole.freq)));
    }

    const fs::path dir = config.output_dir / ("seed_" + std::to_string(seed));
    ensure_directory(dir);
    write_json(dir / "instance.json", instance_to_json(shape, instance));
    write_json(dir / "certificate.json", certificate_to_json(cert));
  } catch (const std::exception& e) {
    report.error = e.what();
    report.certified = false;
  }
  report.seconds = seconds_since(started);
  return report;
}

std::vector<EquivalenceReport> run_equivalence_suite(int runs, std::uint64_t first_seed,
                                                     const SolverSettings& settings) {
  const GridShape shape({8});
  std::vector<EquivalenceReport> out;
  for (int r = 0; r < runs; ++r) {
    EquivalenceReport row;
    row.seed = first_seed + static_cast<std::uint64_t>(r);
    row.sparsity = 1 + r % 3;
    const Instance instance = random_instance(shape, row.sparsity, 6, 1.0 / 8.0,
                                              AmplitudeLaw::kHalfPlusChiSq1, row.seed);
    const TensorSamples x_obs = restrict_to(synthesize(instance.signal, shape), instance.mask);
    row.dual_value = solve_restricted_dual(x_obs, {7}, settings).p_m_dual;
    row.primal_value = solve_primal_1d(x_obs, settings).value;
    row.discrepancy =
        std::abs(row.dual_value - row.primal_value) / (1.0 + std::abs(row.primal_value));
    out.push_back(row);
  }
  return out;
}

ReproduceReport cmd_reproduce(const RunConfig& config, std::ostream& log) {
  config.validate();
  ensure_directory(config.output_dir);
  ReproduceReport report;
  report.seeds.resize(static_cast<std::size_t>(config.seeds));

  unsigned workers = config.threads > 0 ? static_cast<unsigned>(config.threads)
                                        : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, static_cast<unsigned>(config.seeds));
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  log << std::setprecision(17);
  auto work = [&] {
    for (std::size_t i = next++; i < report.seeds.size(); i = next++) {
      report.seeds[i] = run_seed(config, config.seed + i);
      const SeedReport& r = report.seeds[i];
      std::lock_guard<std::mutex> lock(log_mutex);
      log << "seed " << r.seed << ": " << (r.certified ? "certified" : "uncertified")
          << " max_pole_error=" << r.max_pole_error << " gap=" << r.gap
          << " seconds=" << r.seconds;
      if (!r.error.empty()) log << " error=" << r.error;
      log << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (unsigned w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();

  report.equivalence = run_equivalence_suite(config.equivalence_runs, config.seed, config.solver);
  for (const auto& row : report.equivalence) {
    report.max_equivalence_discrepancy =
        std::max(report.max_equivalence_discrepancy, row.discrepancy);
  }

  {
    std::ofstream out = open_output(config.output_dir / "reproduce_summary.csv");
    out << "seed,certified,max_pole_error,min_true_modulus,gap,relative_gap,p_m_dual,"
           "p_primal_f,estimated_poles,seconds,error\n";
    for (const auto& r : report.seeds) {
      out << r.seed << ',' << (r.certified ? 1 : 0) << ',' << r.max_pole_error << ','
          << r.min_true_modulus << ',' << r.gap << ',' << r.relative_gap << ',' << r.p_m_dual
          << ',' << r.p_primal_f << ',' << r.estimated_poles << ',' << r.seconds << ','
          << std::quoted(r.error) << '\n';
    }
  }
  {
    std::ofstream out = open_output(config.output_dir / "equivalence.csv");
    out << "seed,sparsity,dual_value,primal_value,discrepancy\n";
    for (const auto& row : report.equivalence) {
      out << row.seed << ',' << row.sparsity << ',' << row.dual_value << ','
          << row.primal_value << ',' << row.discrepancy << '\n';
    }
  }
  log << "certified " << report.certified_count() << " of " << report.seeds.size()
      << "; max equivalence discrepancy " << report.max_equivalence_discrepancy << '\n';
  return report;
}

}  // namespace atomic_sdp
