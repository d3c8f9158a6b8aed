#pragma once

#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmeasure/gmodel.hpp"
#include "gmeasure/qrule.hpp"

namespace gmeasure {

enum class Verdict { kHolds, kFails, kInconclusive, kNotApplicable };

std::string verdict_name(Verdict v);

struct CriterionReport {
  std::string criterion;
  nlohmann::json model;
  Verdict verdict = Verdict::kInconclusive;
  std::string certificate;
  nlohmann::json series = nlohmann::json::object();
  nlohmann::json caps = nlohmann::json::object();

  nlohmann::json to_json() const;
};

// ---- V(q) = sum_k prod_{i<=k} (1 - q_i) ----

struct VResult {
  enum class Status { kFinite, kDiverges, kInconclusive };
  Status status = Status::kInconclusive;
  double value = 0.0;  // midpoint of [lower, upper] when finite
  double lower = 0.0;
  double upper = 0.0;  // infinity unless finite
  std::size_t terms = 0;
  std::vector<double> partial_sums;  // first terms only
  std::string certificate;
};

std::string status_name(VResult::Status s);

VResult v_of_q(const QRule& q, double tol = 1e-12, std::size_t k_max = std::size_t{1} << 24);

/// 1 + V(q); nullopt when V diverges, and an error when undecided.
struct MResult {
  VResult v;
  std::optional<double> value;  // nullopt: infinite
};
MResult m_of_q(const QRule& q, double tol = 1e-12, std::size_t k_max = std::size_t{1} << 24);

// ---- counts and pressure ----

struct GrowthSeries {
  std::vector<std::uint64_t> contexts;        // |tau^n|, n = 1..N
  std::vector<std::uint64_t> discontinuities; // |D^n|
  std::vector<double> context_root;           // |tau^n|^{1/n}
  std::vector<double> discontinuity_root;
};

/// Counts come from the models' closed forms where they have them.
GrowthSeries growth_series(const GModel& m, std::size_t N);

struct PressureSeries {
  std::vector<double> p;           // p_n, n = 1..N
  std::vector<double> count_bound; // (1/n) log |D^n|
  bool exact = true;
  Verdict verdict = Verdict::kInconclusive;  // of P_g(D_g) < 0
  std::optional<SupProduct> limit;
  std::string certificate;
};

PressureSeries pressure_series(const GModel& m, std::size_t N, std::size_t cap = kDefaultEnumerationCap);

// ---- v-freeness and the explicit uniqueness criterion ----

struct VFreeResult {
  Verdict verdict = Verdict::kInconclusive;
  std::size_t checked_up_to = 0;
  std::optional<Word> witness;
  std::string certificate;
};

VFreeResult v_free_check(const PrefixFamily& family, WordView v, std::size_t N, std::size_t cap = kDefaultEnumerationCap);
VFreeResult v_free_check(const GModel& m, WordView v, std::size_t N, std::size_t cap = kDefaultEnumerationCap);

/// Compares the growth of tau^n with [1 - (|A|-1) inf g]^{-1}.
CriterionReport corollary5_check(const GModel& m, std::size_t N, std::size_t cap = kDefaultEnumerationCap);

// ---- generalized renewal family ----

struct SummabilityResult {
  bool summable = false;  // delta + 1 < alpha
  std::vector<std::size_t> at;     // truncation points I
  std::vector<double> partial;     // the double sum up to I
  double trend = 0.0;              // increment over the last doubling / previous one
};

SummabilityResult summability_classifier(double alpha, double delta, std::size_t I = std::size_t{1} << 16,
                                         std::uint64_t c1 = 1);

struct SandwichRates {
  std::vector<double> s;
  std::vector<double> r;
  VResult v_s;
  VResult v_r;
  Verdict existence = Verdict::kInconclusive;     // V(s) < infinity
  Verdict nonexistence = Verdict::kInconclusive;  // V(r) = infinity
};

/// s_i and r_i are inf and sup of g(. 1 0^{i-1} 1) over pasts.
SandwichRates sr_sandwich(const GModel& m, std::size_t K);

}  // namespace gmeasure
