#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "gmeasure/error.hpp"
#include "gmeasure/experiment.hpp"

using namespace gmeasure;
using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ErrorCode code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kCapability;
}

}  // namespace

TEST(Config, RoundTrip) {
  ExperimentConfig c;
  c.operation = "cesaro";
  c.model = {{"family", "spinflip"}, {"epsilon", 0.3}};
  c.past = "(+)";
  c.params = {{"k", 10}, {"n", 2}};
  c.seed = 99;
  c.max_exact_states = 1000;
  c.enumeration_cap = 12;
  c.out = "somewhere";
  const json j = c.to_json();
  const ExperimentConfig d = ExperimentConfig::from_json(j);
  EXPECT_EQ(d.to_json(), j);
  EXPECT_EQ(d.seed, 99u);
  EXPECT_EQ(d.enumeration_cap, 12u);
}

TEST(Config, UnknownFieldsRejected) {
  json j = {{"operation", "sample"}, {"model", {{"family", "berger"}}}, {"bogus", 1}};
  EXPECT_EQ(code_of([&] { ExperimentConfig::from_json(j); }), ErrorCode::kValidation);
  j.erase("bogus");
  j["caps"] = {{"enumeration", 10}, {"other", 2}};
  EXPECT_EQ(code_of([&] { ExperimentConfig::from_json(j); }), ErrorCode::kValidation);
  j.erase("caps");
  j["params"] = {{"T", 10}, {"TT", 3}};
  EXPECT_EQ(code_of([&] { run(ExperimentConfig::from_json(j)); }), ErrorCode::kValidation);
  j["operation"] = "no-such-op";
  j["params"] = json::object();
  EXPECT_EQ(code_of([&] { run(ExperimentConfig::from_json(j)); }), ErrorCode::kValidation);
}

TEST(Result, GoldenSchema) {
  const auto bundle = run(find_preset("appendix-figure2").config);
  EXPECT_EQ(bundle.result["schema"], kResultSchema);
  EXPECT_EQ(bundle.result.dump(2) + "\n", slurp(std::filesystem::path(GMEASURE_TEST_DATA) / "appendix_figure2.result.json"));
}

TEST(Result, DeterministicTables) {
  ExperimentConfig c;
  c.operation = "marginal-series";
  c.model = {{"family", "renewal"}, {"q", {{"kind", "harmonic"}}}, {"q_inf", 0.5}};
  c.params = {{"I", 30}, {"reps", 500}};
  c.seed = 4;
  const auto a = run(c);
  const auto b = run(c);
  EXPECT_EQ(a.tables, b.tables);
  EXPECT_EQ(a.result, b.result);
  ASSERT_TRUE(a.tables.count("marginal_series.csv"));
  EXPECT_EQ(a.tables.at("marginal_series.csv").rfind("# ", 0), 0u);
  c.seed = 5;
  EXPECT_NE(run(c).tables, a.tables);
}

TEST(Result, WritesBundleFiles) {
  const auto dir = std::filesystem::temp_directory_path() / "gmeasure_test_bundle";
  std::filesystem::remove_all(dir);
  run(find_preset("spinflip-claim").config).write(dir);
  EXPECT_TRUE(std::filesystem::exists(dir / "result.json"));
  EXPECT_TRUE(std::filesystem::exists(dir / "diagnostics.json"));
  const json diag = json::parse(slurp(dir / "diagnostics.json"));
  EXPECT_TRUE(diag.contains("wall_seconds"));
  std::filesystem::remove_all(dir);
}

TEST(Result, ErrorCodesPropagate) {
  ExperimentConfig c;
  c.operation = "cesaro";
  c.model = {{"family", "generalized_renewal"}, {"s", {{"kind", "harmonic"}}}, {"s_inf", 0.5}, {"spread", 0.5},
             {"h", {{"delta", 0.5}}}};
  c.params = {{"k", 40}, {"n", 2}};
  c.max_exact_states = 32;
  EXPECT_EQ(code_of([&] { run(c); }), ErrorCode::kResourceCap);

  ExperimentConfig cp;
  cp.operation = "couple";
  cp.model = {{"family", "renewal"}, {"q", {{"kind", "constant"}, {"value", 0.2}}}, {"q_inf", 0.2}};
  cp.params = {{"T", 10}, {"lower_model", {{"family", "renewal"}, {"q", {{"kind", "constant"}, {"value", 0.6}}}, {"q_inf", 0.6}}}};
  EXPECT_EQ(code_of([&] { run(cp); }), ErrorCode::kOrderingViolated);
}

TEST(Presets, CatalogRunsQuickly) {
  std::vector<std::string> names;
  for (const auto& p : presets()) names.push_back(p.name);
  for (const char* expected : {"renewal-case1", "renewal-case2", "renewal-case3", "trunk-corollary5",
                               "berger-density", "spinflip-claim", "appendix-figure2", "generalized-renewal-grid"})
    EXPECT_NE(std::find(names.begin(), names.end(), expected), names.end()) << expected;
  for (const auto& p : presets()) {
    EXPECT_FALSE(p.topic.empty());
    const auto t0 = std::chrono::steady_clock::now();
    const auto bundle = run(p.config);
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LT(s, 60.0) << p.name;
    EXPECT_EQ(bundle.result["schema"], kResultSchema);
  }
  EXPECT_EQ(code_of([] { find_preset("nope"); }), ErrorCode::kValidation);
}

TEST(Presets, TrunkReportsUniqueness) {
  const auto bundle = run(find_preset("trunk-corollary5").config);
  EXPECT_EQ(bundle.result["payload"]["explicit_uniqueness"]["verdict"], "holds");
}
