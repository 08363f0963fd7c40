#include "rmtlab/errors.hpp"
#include "rmtlab/harness.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <algorithm>
#include <fstream>
#include <sstream>

using namespace rmtlab;
namespace fs = std::filesystem;

namespace {

class HarnessTest : public ::testing::Test {
 protected:
  void SetUp() override {
    root_ = fs::temp_directory_path() / ("rmtlab-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                         "-" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(root_);
    fs::create_directories(root_);
  }
  void TearDown() override { fs::remove_all(root_); }

  ExperimentConfig config(const std::string& text) {
    auto c = parse_config(text);
    c.output_dir = root_.string();
    return c;
  }

  static std::string read(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
  }

  static std::string without_first_line(const std::string& s) { return s.substr(s.find('\n') + 1); }

  fs::path root_;
};

}  // namespace

TEST_F(HarnessTest, UnknownExperimentNamesTheField) {
  try {
    parse_config(R"({"experiment": "tea"})");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "experiment");
    EXPECT_EQ(e.line(), 1);
  }
}

TEST_F(HarnessTest, UnknownKeysRejectedWithLine) {
  try {
    parse_config("{\n  \"experiment\": \"density\",\n  \"parameters\": {\n    \"colour\": 1\n  }\n}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.field(), "colour");
    EXPECT_EQ(e.line(), 4);
  }
  EXPECT_THROW(parse_config(R"({"experiment": "density", "extra": 1})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "density", "ensemble": {"dimension": 4}})"), ConfigError);
}

TEST_F(HarnessTest, SyntaxErrorCarriesLine) {
  try {
    parse_config("{\n\"experiment\": \"density\",\n,}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3);
  }
}

TEST_F(HarnessTest, BadValues) {
  EXPECT_THROW(parse_config(R"({"experiment": "density", "parameters": {"eta": -1}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "density", "parameters": {"N": [0]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "density", "parameters": {"z": [[1, 2, 3]]}})"), ConfigError);
  EXPECT_THROW(parse_config(R"({"experiment": "density", "ensemble": {"entry_law": "cauchy"}})"), ConfigError);
}

TEST_F(HarnessTest, ResolvedConfigRoundTrips) {
  const auto c = parse_config(R"({"experiment": "compare",
    "ensemble": {"entry_law": "two_point_asymmetric"},
    "parameters": {"N": [40], "z": [[0.5, 0.25]], "w": [[1, 0.05]], "v": [0.01, 0.005], "law_prime": "laplace",
                   "seed": 18446744073709551615},
    "threads": 2})");
  EXPECT_EQ(parse_config(to_text(c)), c);
  EXPECT_EQ(c.params.seed, 18446744073709551615ULL);
  EXPECT_EQ(config_hash(c), config_hash(parse_config(to_text(c))));
  auto d = c;
  d.params.seed = 1;
  EXPECT_NE(config_hash(c), config_hash(d));
}

TEST_F(HarnessTest, IdentitiesRunPasses) {
  const auto store = run(config(R"({"experiment": "identities", "parameters": {"N": 64, "trials": 10}})"));
  EXPECT_TRUE(store.deterministic_ok);
  EXPECT_TRUE(fs::exists(store.directory / "config.json"));
  EXPECT_TRUE(fs::exists(store.directory / "summary.json"));
  EXPECT_EQ(read(store.directory / "identities.csv").rfind("# run-id: " + store.run_id, 0), 0U);
  EXPECT_EQ(parse_config(read(store.directory / "config.json")).params.trials, 10U);
}

TEST_F(HarnessTest, RerunReproducesCsvBytes) {
  const auto c = config(R"({"experiment": "spectra", "parameters": {"N": [30], "trials": 2, "seed": 4}})");
  const auto a = run(c);
  const auto b = run(c);
  EXPECT_NE(a.run_id, b.run_id);
  EXPECT_EQ(without_first_line(read(a.directory / "eigenvalues.csv")),
            without_first_line(read(b.directory / "eigenvalues.csv")));
}

TEST_F(HarnessTest, ScalingSummaryHasSlopeAndBand) {
  const auto store = run(config(
      R"({"experiment": "scaling", "parameters": {"N": [16, 24, 32], "trials": 20, "s": 0.1, "z0": 0, "bootstrap": 20}})"));
  EXPECT_NE(store.summary.find("\"slope\""), std::string::npos);
  EXPECT_NE(store.summary.find("\"band\""), std::string::npos);
  const Table* t = store.find("scaling");
  ASSERT_NE(t, nullptr);
  EXPECT_EQ(std::count(t->csv.begin(), t->csv.end(), '\n'), 4);
}

TEST_F(HarnessTest, ThreadCountDoesNotChangeTables) {
  auto c = config(R"({"experiment": "scaling", "parameters": {"N": [16, 20, 24], "trials": 20, "bootstrap": 10}})");
  const auto a = run(c);
  c.threads = 3;
  const auto b = run(c);
  EXPECT_EQ(a.find("records")->csv, b.find("records")->csv);
  EXPECT_EQ(a.find("scaling")->csv, b.find("scaling")->csv);
}

TEST_F(HarnessTest, EmitDensityAndEigenvalues) {
  const auto d = run(config(R"({"experiment": "density", "parameters": {"z": [0], "points": 50, "x_min": 0.1, "x_max": 4.5}})"));
  EXPECT_TRUE(d.deterministic_ok);
  const auto p = emit_plotdata(load_store(d.run_id, root_), "density");
  const std::string csv = without_first_line(read(p));
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "x,rho,rho_mp_reference");
  EXPECT_THROW(emit_plotdata(d, "eigenvalues"), Error);

  const auto s = run(config(R"({"experiment": "spectra", "parameters": {"N": [200], "trials": 1}})"));
  const std::string eig = without_first_line(read(emit_plotdata(s, "eigenvalues")));
  EXPECT_EQ(std::count(eig.begin(), eig.end(), '\n'), 201);
  const auto ids = list_runs(root_);
  EXPECT_EQ(ids.size(), 2U);
}

TEST_F(HarnessTest, CompareRunChecksFirstOrder) {
  const auto store = run(config(R"({"experiment": "compare", "ensemble": {"entry_law": "two_point_asymmetric"},
    "parameters": {"N": [30], "a": 2, "b": 5, "z": [1], "w": [[1, 0.05]]}})"));
  EXPECT_TRUE(store.deterministic_ok) << store.summary;
  ASSERT_NE(store.find("expansion"), nullptr);
}

TEST_F(HarnessTest, OutputRootFromEnvironment) {
  ::setenv("RMTLAB_OUTPUT_ROOT", root_.c_str(), 1);
  EXPECT_EQ(output_root(), root_);
  ::unsetenv("RMTLAB_OUTPUT_ROOT");
  EXPECT_EQ(output_root(), fs::path("rmtlab-runs"));
}
