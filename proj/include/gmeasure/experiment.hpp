#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace gmeasure {

inline constexpr const char* kResultSchema = "gmeasure.result/1";

struct ExperimentConfig {
  std::string operation;
  nlohmann::json model;                 // null for operations that take none
  std::string past = "(0)1";
  nlohmann::json params = nlohmann::json::object();
  std::uint64_t seed = 1;
  std::size_t max_exact_states = std::size_t{1} << 20;
  std::size_t enumeration_cap = 24;
  std::string out;                      // empty: do not write

  nlohmann::json to_json() const;
  static ExperimentConfig from_json(const nlohmann::json& j);
};

struct ResultBundle {
  nlohmann::json result;                      // schema, config echo, payload
  std::map<std::string, std::string> tables;  // file name -> CSV text
  nlohmann::json diagnostics;                 // timings; kept apart so payloads stay byte-stable

  void write(const std::filesystem::path& dir) const;
};

std::vector<std::string> operation_names();
ResultBundle run(const ExperimentConfig& config);

struct Preset {
  std::string name;
  std::string topic;
  std::string description;
  ExperimentConfig config;
};

const std::vector<Preset>& presets();
const Preset& find_preset(const std::string& name);

}  // namespace gmeasure
