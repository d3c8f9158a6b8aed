#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "gmeasure/error.hpp"
#include "gmeasure/experiment.hpp"

namespace {

int exit_code(gmeasure::ErrorCode c) {
  using gmeasure::ErrorCode;
  switch (c) {
    case ErrorCode::kValidation: return 2;
    case ErrorCode::kResourceCap: return 3;
    case ErrorCode::kOrderingViolated: return 4;
    case ErrorCode::kConstructionMismatch: return 5;
    case ErrorCode::kCapability:
    case ErrorCode::kNotApplicable:
    case ErrorCode::kUndefinedResidual: return 6;
  }
  return 1;
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  gmeasure::require(static_cast<bool>(in), "cannot open " + path);
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    gmeasure::fail(gmeasure::ErrorCode::kValidation, path + ": " + e.what());
  }
}

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_exact_states;
  std::string out;
};

int execute(gmeasure::ExperimentConfig config, const Overrides& o) {
  if (o.seed) config.seed = *o.seed;
  if (o.max_exact_states) config.max_exact_states = *o.max_exact_states;
  if (!o.out.empty()) config.out = o.out;
  const auto bundle = gmeasure::run(config);
  if (!config.out.empty()) bundle.write(config.out);
  std::cout << bundle.result.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Existence and uniqueness diagnostics for g-measures"};
  app.require_subcommand(1);
  app.fallthrough();
  Overrides o;
  std::string config_path, preset_name;
  app.add_option("--seed", o.seed, "override the config seed");
  app.add_option("--out", o.out, "directory for result.json, CSV tables and diagnostics.json");
  app.add_option("--max-exact-states", o.max_exact_states, "cap on merged states in exact forward passes");

  auto* list = app.add_subcommand("list", "list preset experiments and operations");
  auto* run = app.add_subcommand("run", "run a config file or a named preset");
  run->add_option("--config", config_path, "experiment config JSON");
  run->add_option("--preset", preset_name, "preset name (see 'list')");

  std::vector<std::pair<std::string, CLI::App*>> ops;
  for (const auto& name : gmeasure::operation_names()) {
    auto* sub = app.add_subcommand(name, "run the '" + name + "' operation");
    sub->add_option("--config", config_path, "experiment config JSON")->required();
    ops.emplace_back(name, sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      nlohmann::json catalog = nlohmann::json::array();
      for (const auto& p : gmeasure::presets())
        catalog.push_back({{"name", p.name}, {"topic", p.topic}, {"description", p.description},
                           {"operation", p.config.operation}});
      std::cout << nlohmann::json{{"presets", catalog}, {"operations", gmeasure::operation_names()}}.dump(2) << '\n';
      return 0;
    }
    if (run->parsed()) {
      gmeasure::require(config_path.empty() != preset_name.empty(), "run takes exactly one of --config, --preset");
      if (!preset_name.empty()) return execute(gmeasure::find_preset(preset_name).config, o);
      return execute(gmeasure::ExperimentConfig::from_json(read_json(config_path)), o);
    }
    for (const auto& [name, sub] : ops) {
      if (!sub->parsed()) continue;
      nlohmann::json j = read_json(config_path);
      gmeasure::require(j.is_object(), "config must be a JSON object");
      if (!j.contains("operation")) j["operation"] = name;
      gmeasure::require(j["operation"] == name, "config operation does not match the subcommand '" + name + "'");
      return execute(gmeasure::ExperimentConfig::from_json(j), o);
    }
  } catch (const gmeasure::Error& e) {
    std::cerr << nlohmann::json{{"error", gmeasure::error_code_name(e.code())}, {"message", e.what()}}.dump() << '\n';
    return exit_code(e.code());
  } catch (const std::exception& e) {
    std::cerr << nlohmann::json{{"error", "internal"}, {"message", e.what()}}.dump() << '\n';
    return 1;
  }
  return 1;
}
