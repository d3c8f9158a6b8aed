#include <algorithm>

#include <nlohmann/json.hpp>

#include "gmeasure/models.hpp"

namespace gmeasure {

namespace {

void only_fields(const nlohmann::json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    require(known, "unknown field '" + item.key() + "' in " + where);
  }
}

template <class T>
T get_or(const nlohmann::json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

std::unique_ptr<GModel> model_from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("family") && j["family"].is_string(),
          "model descriptor needs a string 'family'");
  const std::string family = j["family"];
  try {
    if (family == "renewal") {
      only_fields(j, {"family", "q", "q_inf"}, "renewal model");
      return std::make_unique<RenewalModel>(QRule::from_json(j.at("q")), j.at("q_inf").get<double>());
    }
    if (family == "tabulated") {
      only_fields(j, {"family", "alphabet", "contexts", "default"}, "tabulated model");
      const Alphabet alphabet(get_or<std::string>(j, "alphabet", "01"));
      std::map<Word, std::vector<double>> contexts;
      for (const auto& [k, v] : j.at("contexts").items()) contexts[alphabet.parse(k)] = v.get<std::vector<double>>();
      std::optional<std::vector<double>> fallback;
      if (j.contains("default")) fallback = j["default"].get<std::vector<double>>();
      return std::make_unique<TabulatedTree>(alphabet, std::move(contexts), std::move(fallback));
    }
    if (family == "generalized_renewal") {
      only_fields(j, {"family", "s", "s_inf", "spread", "h"}, "generalized renewal model");
      const auto& h = j.at("h");
      only_fields(h, {"c1", "delta"}, "window rule h");
      return std::make_unique<GeneralizedRenewalModel>(QRule::from_json(j.at("s")), j.at("s_inf").get<double>(),
                                                       j.at("spread").get<double>(),
                                                       get_or<std::uint64_t>(h, "c1", 1), h.at("delta").get<double>());
    }
    if (family == "berger") {
      only_fields(j, {"family", "prob_one_dense", "prob_one_sparse", "threshold"}, "berger model");
      return std::make_unique<BergerModel>(get_or(j, "prob_one_dense", 0.3), get_or(j, "prob_one_sparse", 0.7),
                                           get_or(j, "threshold", 0.5));
    }
    if (family == "trunk") {
      only_fields(j, {"family", "epsilon", "trunk_length"}, "trunk model");
      return std::make_unique<TrunkTreeModel>(j.at("epsilon").get<double>(),
                                              get_or<std::size_t>(j, "trunk_length", 1u << 14));
    }
    if (family == "spinflip") {
      only_fields(j, {"family", "epsilon"}, "spin-flip model");
      return std::make_unique<SpinFlipFactor>(j.at("epsilon").get<double>());
    }
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kValidation, family + " descriptor: " + e.what());
  }
  fail(ErrorCode::kValidation, "unknown model family '" + family + "'");
}

}  // namespace gmeasure
