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

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "atomic_sdp/harness.hpp"

namespace atomic_sdp {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("atomic_sdp_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
  }

  static json read_json(const fs::path& p) { return json::parse(slurp(p)); }

  RunConfig small_config(const std::string& sub) const {
    RunConfig c;
    c.dims = {6, 6};
    c.sparsity = 2;
    c.observations = 20;
    c.min_separation = 0.2;
    c.output_dir = dir_ / sub;
    return c;
  }

  fs::path write_instance(const std::string& name, const GridShape& shape, const Instance& inst) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << instance_to_json(shape, inst).dump(2);
    return p;
  }

  fs::path dir_;
};

TEST_F(HarnessTest, ConfigRoundTripsThroughJson) {
  RunConfig c = small_config("x");
  c.schedule = {{5, 5}, {1, 1}, {7, 7}};
  c.grid_density = {40, 40};
  c.solver.rel_tol = 3e-9;
  c.law = AmplitudeLaw::kUnit;
  const RunConfig back = run_config_from_json(to_json(c));
  EXPECT_EQ(to_json(back), to_json(c));
  EXPECT_EQ(back.schedule.cap, (DegreeVector{7, 7}));
  EXPECT_EQ(back.solver.rel_tol, 3e-9);
}

TEST_F(HarnessTest, ConfigValidation) {
  EXPECT_THROW(run_config_from_json({{"dims", {3, 3}}, {"observations", 10}}), ValidationError);
  EXPECT_THROW(run_config_from_json({{"dimz", {3, 3}}}), ValidationError);
  EXPECT_THROW(run_config_from_json({{"sparsity", "eight"}}), ValidationError);
  EXPECT_THROW(run_config_from_json({{"amplitude_law", "cauchy"}}), ValidationError);
  EXPECT_THROW(run_config_from_json({{"degree_schedule", {{"start", {3, 3}}}}}), ValidationError);
  const RunConfig ok = run_config_from_json({{"dims", {3, 3}}, {"observations", 9}});
  EXPECT_EQ(ok.sparsity, 8);
}

TEST_F(HarnessTest, ReproductionDefaults) {
  const RunConfig c = reproduction_config();
  EXPECT_EQ(c.dims, (std::vector<int>{12, 12}));
  EXPECT_EQ(c.sparsity, 8);
  EXPECT_EQ(c.observations, 60);
  EXPECT_DOUBLE_EQ(c.min_separation, 1.5 / 12);
  EXPECT_EQ(c.schedule.start, (DegreeVector{11, 11}));
  EXPECT_EQ(c.seeds, 10);
}

TEST_F(HarnessTest, GenerateIsByteIdenticalPerSeed) {
  RunConfig c = reproduction_config();
  c.output_dir = dir_ / "a";
  const std::string first = slurp(cmd_generate(c));
  c.output_dir = dir_ / "b";
  EXPECT_EQ(slurp(cmd_generate(c)), first);
  c.seed = 2;
  c.output_dir = dir_ / "c";
  EXPECT_NE(slurp(cmd_generate(c)), first);

  const InstanceFile file = instance_from_json(json::parse(first));
  EXPECT_EQ(file.instance.signal.sparsity(), 8u);
  EXPECT_EQ(file.instance.mask.size(), 60u);
  EXPECT_EQ(file.shape.dims(), (std::vector<int>{12, 12}));
}

TEST_F(HarnessTest, GenerateRejectsTooManyObservations) {
  RunConfig c = small_config("g");
  c.observations = 37;
  EXPECT_THROW(cmd_generate(c), ValidationError);
}

TEST_F(HarnessTest, InstanceJsonRoundTripsExactly) {
  const GridShape shape({5, 3});
  const Instance inst = random_instance(shape, 2, 7, 0.1, AmplitudeLaw::kHalfPlusChiSq1, 77);
  const json j = instance_to_json(shape, inst);
  const InstanceFile back = instance_from_json(json::parse(j.dump()));
  ASSERT_EQ(back.instance.signal.sparsity(), 2u);
  for (std::size_t k = 0; k < 2; ++k) {
    EXPECT_EQ(back.instance.signal.poles()[k].freq, inst.signal.poles()[k].freq);
    EXPECT_EQ(back.instance.signal.poles()[k].coeff, inst.signal.poles()[k].coeff);
  }
  EXPECT_EQ(back.instance.mask.indices(), inst.mask.indices());
  EXPECT_EQ(back.instance.seed, 77u);
}

TEST_F(HarnessTest, SolveSingleAtomExitsZero) {
  const GridShape shape({6, 6});
  Instance inst;
  inst.signal = SpectralSignal(2, {{{0.3, 0.55}, {0.8, -0.6}}});
  inst.mask = random_instance(shape, 1, 8, 0.0, AmplitudeLaw::kUnit, 4).mask;
  const fs::path p = write_instance("single.json", shape, inst);
  std::ostringstream log;
  RunConfig c = small_config("solve");
  c.trace = true;
  c.dump_sdp = true;
  ASSERT_EQ(cmd_solve(p, c, log), kExitCertified) << log.str();

  const json cert = read_json(c.output_dir / "certificate.json");
  EXPECT_EQ(cert.at("verdict"), "certified");
  ASSERT_EQ(cert.at("poles").size(), 1u);
  for (const char* key : {"p_m_dual", "p_primal_f", "gap", "residual", "degree", "history"}) {
    EXPECT_TRUE(cert.contains(key)) << key;
  }
  const json rec = read_json(c.output_dir / "recovered.json");
  EXPECT_EQ(rec.at("poles").size(), 1u);
  EXPECT_TRUE(fs::exists(c.output_dir / "solver_trace.csv"));
  EXPECT_TRUE(fs::exists(c.output_dir / "problem_dump.txt"));
}

TEST_F(HarnessTest, SolveIsDeterministicApartFromTimings) {
  RunConfig c = small_config("gen");
  c.seed = 12;
  const fs::path p = cmd_generate(c);
  std::ostringstream log;
  json runs[2];
  for (int r = 0; r < 2; ++r) {
    c.output_dir = dir_ / ("run" + std::to_string(r));
    cmd_solve(p, c, log);
    runs[r] = read_json(c.output_dir / "certificate.json");
    for (auto& step : runs[r].at("history")) step.erase("seconds");
  }
  EXPECT_EQ(runs[0], runs[1]);
}

TEST_F(HarnessTest, EmptyMaskIsAValidationError) {
  const fs::path p = dir_ / "empty.json";
  std::ofstream(p) << R"({"dims": [4], "poles": [{"freq": [0.25], "re": 1.0, "im": 0.0}],
                         "mask": [], "seed": 0})";
  std::ostringstream log;
  RunConfig c = small_config("empty");
  EXPECT_EQ(cmd_solve(p, c, log), kExitInvalid);
  EXPECT_EQ(read_json(c.output_dir / "error.json").at("error"), "validation");
  EXPECT_THROW(load_instance(p), ValidationError);
}

TEST_F(HarnessTest, DualplotOfZeroSignalIsAllZeros) {
  const GridShape shape({4, 4});
  Instance inst;
  inst.signal = SpectralSignal(2, {});
  inst.mask = SampleMask(shape, {{0, 0}, {1, 2}, {3, 3}});
  const fs::path p = write_instance("zero.json", shape, inst);
  RunConfig c = small_config("zero");
  c.grid_density = {20, 20};
  std::ostringstream log;
  ASSERT_EQ(cmd_dualplot(p, c, log), kExitCertified) << log.str();
  std::ifstream in(c.output_dir / "dual_modulus.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "f_1,f_2,modulus");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "0");
  }
  EXPECT_EQ(rows, 400);
}

TEST_F(HarnessTest, DualplotReportsTruePolesNearUnitModulus) {
  RunConfig c = small_config("plot");
  c.seed = 5;
  const fs::path p = cmd_generate(c);
  std::ostringstream log;
  ASSERT_EQ(cmd_dualplot(p, c, log), kExitCertified) << log.str();
  std::ifstream in(c.output_dir / "poles.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "kind,f_1,f_2,re,im,modulus");
  int truths = 0, estimates = 0;
  while (std::getline(in, line)) {
    const double modulus = std::stod(line.substr(line.rfind(',') + 1));
    if (line.rfind("true,", 0) == 0) {
      ++truths;
      EXPECT_GE(modulus, 0.999);
    } else {
      ++estimates;
    }
  }
  EXPECT_EQ(truths, 2);
  EXPECT_EQ(estimates, 2);
}

TEST_F(HarnessTest, ReproduceWritesSummaries) {
  RunConfig c = small_config("repro");
  c.seeds = 2;
  c.threads = 2;
  c.equivalence_runs = 2;
  std::ostringstream log;
  const ReproduceReport report = cmd_reproduce(c, log);
  ASSERT_EQ(report.seeds.size(), 2u);
  EXPECT_EQ(report.seeds[0].seed, 1u);
  EXPECT_EQ(report.seeds[1].seed, 2u);
  EXPECT_EQ(report.certified_count(), 2);
  ASSERT_EQ(report.equivalence.size(), 2u);
  EXPECT_LE(report.max_equivalence_discrepancy, 1e-4);

  std::ifstream in(c.output_dir / "reproduce_summary.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header.rfind("seed,certified,max_pole_error,min_true_modulus,gap,", 0), 0u);
  EXPECT_TRUE(fs::exists(c.output_dir / "equivalence.csv"));
  EXPECT_TRUE(fs::exists(c.output_dir / "seed_1" / "certificate.json"));
}

}  // namespace
}  // namespace atomic_sdp
