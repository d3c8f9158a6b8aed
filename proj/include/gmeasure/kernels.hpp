#pragma once

#include <cstdint>
#include <vector>

#include "gmeasure/gmodel.hpp"
#include "gmeasure/rng.hpp"

namespace gmeasure {

// Every data-parallel loop has a serial twin computing the same thing in the
// same reduction order, so the two agree bit for bit.
enum class Exec { kSerial, kParallel };

/// Inverse CDF over the alphabet order.
Symbol draw(const Walker& w, std::size_t alphabet_size, double u);

/// x_0 .. x_{T-1} from replica stream `stream`.
Word simulate(const GModel& m, const AnchoredPast& p, std::size_t T, std::uint64_t seed, std::uint64_t stream);

/// sum_s weights[s] * P_s(w) for every word w of length n, indexed by rank.
std::vector<double> window_table(const std::vector<const Walker*>& walkers, const std::vector<double>& weights,
                                 std::size_t n, std::size_t alphabet_size, Exec exec);

/// counts[i] = number of replicas with x_i == target, i = 0..I.
std::vector<std::uint64_t> hit_counts(const GModel& m, const AnchoredPast& p, std::size_t I, Symbol target,
                                      std::size_t reps, std::uint64_t seed, Exec exec);

/// Histogram (by rank) of the word at times [start, start+n) over replicas.
std::vector<std::uint64_t> window_counts(const GModel& m, const AnchoredPast& p, std::size_t start, std::size_t n,
                                         std::size_t reps, std::uint64_t seed, Exec exec);

}  // namespace gmeasure
