#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmeasure/gmodel.hpp"
#include "gmeasure/kernels.hpp"
#include "gmeasure/measure.hpp"

namespace gmeasure {

struct Trajectory {
  AnchoredPast past;
  nlohmann::json model;
  std::uint64_t seed = 0;
  Word x;
};

/// Replica 0 of the stream family for `seed`.
Trajectory sample(const GModel& m, const AnchoredPast& p, std::size_t T, std::uint64_t seed);

struct MarginalEstimate {
  std::vector<double> estimate;    // fraction of replicas with x_i = target
  std::vector<double> std_error;   // binomial standard error
  std::size_t reps = 0;
  std::uint64_t seed = 0;
};

MarginalEstimate empirical_marginal_series(const GModel& m, const AnchoredPast& p, std::size_t I, std::size_t reps,
                                           std::uint64_t seed, Symbol target = 1, Exec exec = Exec::kParallel);

struct CoupledTrajectory {
  Word x;  // upper chain
  Word y;  // lower chain
  std::uint64_t seed = 0;
};

/// Both chains consume the same uniform each step.  Throws kOrderingViolated
/// when the kernels fail to be stochastically ordered on a visited pair.
CoupledTrajectory ordered_coupling(const GModel& upper, const GModel& lower, const AnchoredPast& p,
                                   const AnchoredPast& p_lower, std::size_t T, std::uint64_t seed);

struct MixingEstimate {
  std::size_t width = 0;
  std::size_t gap = 0;
  std::size_t burn = 0;
  double estimate = 0.0;
  double std_error = 0.0;
  double half_width = 0.0;  // 3 standard errors
  std::size_t reps = 0;
  bool exact = false;
};

// u = x[burn-w+1 .. burn], v = x[burn+n .. burn+n+w-1]; 1/2 sum |P(u,v) - P(u)P(v)|.
MixingEstimate beta_window_estimate(const GModel& m, const AnchoredPast& p, std::size_t n, std::size_t w,
                                    std::size_t burn, std::size_t reps, std::uint64_t seed,
                                    Exec exec = Exec::kParallel);
MixingEstimate beta_window_exact(const GModel& m, const AnchoredPast& p, std::size_t n, std::size_t w,
                                 std::size_t burn, const ExactOptions& opts = {});

struct OverflowResult {
  std::size_t count = 0;
  std::vector<std::uint8_t> indicator;  // indicator[n-1] for n = 1..T
  Word y;
};

/// #{n <= T : y_0..y_{n-1} fixes no context}.
OverflowResult overflow_count(const GModel& m, const AnchoredPast& p, std::size_t T, std::uint64_t seed);

}  // namespace gmeasure
