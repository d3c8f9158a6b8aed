#pragma once

#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json.hpp>

#include "gmeasure/gmodel.hpp"
#include "gmeasure/kernels.hpp"
#include "gmeasure/qrule.hpp"

namespace gmeasure {

inline constexpr std::size_t kDefaultMaxExactStates = std::size_t{1} << 20;

struct ExactOptions {
  std::size_t max_states = kDefaultMaxExactStates;
  Exec exec = Exec::kParallel;
};

struct Provenance {
  enum class Mode { kExact, kMonteCarlo };
  Mode mode = Mode::kExact;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
};

// Probabilities of every word of length n, ordered by lexicographic rank.
struct CylinderTable {
  Alphabet alphabet = Alphabet::binary();
  std::size_t n = 0;
  std::vector<double> prob;
  Provenance provenance;

  double at(WordView w) const;
  double total() const;
  /// Marginal on the first m symbols of the window.
  CylinderTable prefix_marginal(std::size_t m) const;
  /// Marginal on the last m symbols of the window.
  CylinderTable suffix_marginal(std::size_t m) const;

  /// "# {json header}" line, then word,probability rows.
  void write_csv(std::ostream& out, const nlohmann::json& header) const;
  static CylinderTable read_csv(std::istream& in, nlohmann::json* header = nullptr);
};

// Distribution over walker states at a given time, merged by key.  Walkers
// without a key are never merged, which amounts to full enumeration.
class ForwardPass {
 public:
  struct Entry {
    StateKey key;
    double weight = 0.0;
    std::unique_ptr<Walker> walker;
  };

  /// `horizon`: symbol evaluations still to come, counting the one at the current time.
  ForwardPass(const GModel& m, const AnchoredPast& p, std::size_t horizon, const ExactOptions& opts);

  void advance();
  std::size_t time() const noexcept { return time_; }
  const std::vector<Entry>& entries() const noexcept { return entries_; }
  std::vector<double> window(std::size_t n) const;

 private:
  StateKey key_of(const Walker& w, std::size_t horizon);

  const GModel* m_;
  ExactOptions opts_;
  std::size_t horizon_;
  std::size_t time_ = 0;
  std::int64_t serial_ = 0;
  std::vector<Entry> entries_;
};

Prob mu_x_cylinder(const GModel& m, const AnchoredPast& p, WordView w);
Prob shifted_marginal(const GModel& m, const AnchoredPast& p, std::size_t i, WordView w,
                      const ExactOptions& opts = {});
CylinderTable shifted_table(const GModel& m, const AnchoredPast& p, std::size_t i, std::size_t n,
                            const ExactOptions& opts = {});
/// mu^{x,-i}(w) for i = 0..I in a single pass.
std::vector<double> marginal_series(const GModel& m, const AnchoredPast& p, std::size_t I, WordView w,
                                    const ExactOptions& opts = {});
CylinderTable cesaro_table(const GModel& m, const AnchoredPast& p, std::size_t k, std::size_t n,
                           const ExactOptions& opts = {});
/// Cesaro tables for every k = 1..k_max (element k-1), sharing one pass.
std::vector<CylinderTable> cesaro_tables(const GModel& m, const AnchoredPast& p, std::size_t k_max, std::size_t n,
                                         const ExactOptions& opts = {});

/// P(x_i = 1), i = 0..I, for a renewal chain by the renewal equation.
/// `ell0` is the distance to the last 1 in the past (nullopt: none).
std::vector<double> renewal_marginals(const QRule& q, double q_inf, std::optional<std::size_t> ell0, std::size_t I);

/// t(wa) / sum_b t(wb) - g(. w a) for a table of length |w|+1.
double compatibility_residual(const GModel& m, const CylinderTable& t, WordView w, Symbol a);

struct SandwichVerdict {
  bool holds = false;
  double epsilon = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double min_entry = 0.0;
  double max_entry = 0.0;
  std::size_t violations = 0;
};

SandwichVerdict sandwich_check(const GModel& m, const CylinderTable& t);

CylinderTable monte_carlo_table(const GModel& m, const AnchoredPast& p, std::size_t i, std::size_t n,
                                std::size_t samples, std::uint64_t seed, Exec exec = Exec::kParallel);

}  // namespace gmeasure
