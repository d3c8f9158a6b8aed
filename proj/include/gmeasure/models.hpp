#pragma once

#include <map>
#include <memory>
#include <optional>
#include <vector>

#include "gmeasure/gmodel.hpp"
#include "gmeasure/qrule.hpp"

namespace gmeasure {

/// Binary chains whose law for the next symbol is a function of the distance to the last 1.
class RenewalModel : public GModel {
 public:
  RenewalModel(QRule q, double q_inf);

  const QRule& q() const noexcept { return q_; }
  double q_inf() const noexcept { return q_inf_; }
  bool strictly_interior() const;
  /// True when q_i does not converge to q_inf, i.e. the all-zero past is a discontinuity.
  bool discontinuous_at_zero() const;

  std::string family() const override { return "renewal"; }
  nlohmann::json descriptor() const override;
  double eval(const AnchoredPast& p, Symbol a) const override;
  ContextLength context_length(const AnchoredPast& p) const override;
  double variation(const AnchoredPast& p, std::size_t l) const override;
  SupProduct sup_gn(WordView w) const override;
  double inf_g() const override;
  void visit_contexts(std::size_t n, const WordVisitor& visitor) const override;
  void visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const override;
  std::uint64_t count_contexts(std::size_t) const override { return 1; }
  std::uint64_t count_discontinuity_prefixes(std::size_t) const override { return discontinuous_at_zero() ? 1 : 0; }
  bool is_context_suffix(WordView word) const override;
  std::unique_ptr<Walker> walker(const AnchoredPast& p) const override;
  std::optional<double> growth_certificate() const override { return 1.0; }
  std::optional<SupProduct> pressure_limit() const override;
  std::optional<std::vector<AnchoredPast>> discontinuity_points() const override;

  /// lim (1/n) log sup over starting pasts of the probability of n zeros in a row.
  static double zero_run_rate(const QRule& q, double q_inf);

  /// P(next = 1) when the last 1 is `ell` steps back (nullopt: never).
  double prob_one(std::optional<std::size_t> ell) const { return ell ? q_(*ell) : q_inf_; }

 private:
  QRule q_;
  double q_inf_;
};

// Finite probabilistic context tree.  Contexts are given in time order, so
// "10" is the context of every past ending in ...10.
class TabulatedTree : public GModel {
 public:
  TabulatedTree(Alphabet alphabet, std::map<Word, std::vector<double>> contexts,
                std::optional<std::vector<double>> fallback = std::nullopt);

  const std::map<Word, std::vector<double>>& contexts() const noexcept { return contexts_; }
  const std::optional<std::vector<double>>& fallback() const noexcept { return fallback_; }
  std::size_t depth() const noexcept { return depth_; }

  std::string family() const override { return "tabulated"; }
  nlohmann::json descriptor() const override;
  double eval(const AnchoredPast& p, Symbol a) const override;
  ContextLength context_length(const AnchoredPast& p) const override;
  double variation(const AnchoredPast& p, std::size_t l) const override;
  SupProduct sup_gn(WordView w) const override;
  double inf_g() const override;
  void visit_contexts(std::size_t n, const WordVisitor& visitor) const override;
  void visit_discontinuity_prefixes(std::size_t, const WordVisitor&) const override {}
  std::uint64_t count_discontinuity_prefixes(std::size_t) const override { return 0; }
  bool is_context_suffix(WordView word) const override;
  std::unique_ptr<Walker> walker(const AnchoredPast& p) const override;
  std::optional<double> growth_certificate() const override { return 0.0; }
  std::optional<SupProduct> pressure_limit() const override;
  std::optional<std::vector<AnchoredPast>> discontinuity_points() const override {
    return std::vector<AnchoredPast>{};
  }

  struct Node {
    std::vector<std::int32_t> child;  // -1 when absent
    std::int32_t leaf = -1;           // index into leaf_dist_ for context nodes
    std::size_t depth = 0;
  };

  /// Walks backward from the root; returns the distribution and the depth at which it was decided.
  std::pair<const std::vector<double>*, std::size_t> lookup(const AnchoredPast& p) const;
  std::pair<const std::vector<double>*, std::size_t> lookup_backward(WordView backward) const;

 private:
  void collect_oscillation(std::int32_t node, std::vector<double>& lo, std::vector<double>& hi) const;

  std::map<Word, std::vector<double>> contexts_;
  std::optional<std::vector<double>> fallback_;
  std::vector<Node> nodes_;
  std::vector<std::vector<double>> leaf_dist_;
  std::size_t depth_ = 0;
};

// p(1 | past) with l1 = j: s_j + (r_j - s_j) * (fraction of ones among the
// h(j) symbols before that last 1), r_j = s_j + spread (1 - s_j), h(j) = floor(c1 j^delta).
class GeneralizedRenewalModel : public GModel {
 public:
  GeneralizedRenewalModel(QRule s, double s_inf, double spread, std::uint64_t c1, double delta);

  const QRule& s() const noexcept { return s_; }
  double s_inf() const noexcept { return s_inf_; }
  double spread() const noexcept { return spread_; }
  std::uint64_t c1() const noexcept { return c1_; }
  double delta() const noexcept { return delta_; }

  std::size_t h(std::size_t j) const;
  std::size_t H(std::size_t j) const { return j + h(j); }
  /// max { j >= 0 : H(j) <= i }, with H(0) = 0.
  std::size_t H_inverse(std::size_t i) const;
  double r(std::size_t j) const { return s_(j) + spread_ * (1.0 - s_(j)); }
  QRule r_rule() const { return QRule::affine(s_, spread_, 1.0 - spread_); }
  bool discontinuous_at_zero() const;

  std::string family() const override { return "generalized_renewal"; }
  nlohmann::json descriptor() const override;
  double eval(const AnchoredPast& p, Symbol a) const override;
  ContextLength context_length(const AnchoredPast& p) const override;
  double variation(const AnchoredPast& p, std::size_t l) const override;
  SupProduct sup_gn(WordView w) const override;
  double inf_g() const override;
  void visit_contexts(std::size_t n, const WordVisitor& visitor) const override;
  void visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const override;
  std::uint64_t count_contexts(std::size_t n) const override;
  std::uint64_t count_discontinuity_prefixes(std::size_t) const override { return discontinuous_at_zero() ? 1 : 0; }
  bool is_context_suffix(WordView word) const override;
  std::unique_ptr<Walker> walker(const AnchoredPast& p) const override;
  std::optional<double> growth_certificate() const override;
  std::optional<SupProduct> pressure_limit() const override;
  std::optional<std::vector<AnchoredPast>> discontinuity_points() const override;

  /// p(1) given the backward reader: l1 = j and the window of ones before it.
  double prob_one_given(std::size_t j, std::size_t ones_in_window) const;

 private:
  QRule s_;
  double s_inf_;
  double spread_;
  std::uint64_t c1_;
  double delta_;
};

// Two density classes of pasts with swapped Bernoulli laws.
class BergerModel : public GModel {
 public:
  explicit BergerModel(double prob_one_dense = 0.3, double prob_one_sparse = 0.7, double threshold = 0.5);

  bool dense(const AnchoredPast& p) const { return p.upper_density(1) > threshold_; }
  double prob_one_dense() const noexcept { return dense_; }
  double prob_one_sparse() const noexcept { return sparse_; }

  std::string family() const override { return "berger"; }
  nlohmann::json descriptor() const override;
  double eval(const AnchoredPast& p, Symbol a) const override;
  ContextLength context_length(const AnchoredPast&) const override { return std::nullopt; }
  double variation(const AnchoredPast& p, std::size_t l) const override;
  SupProduct sup_gn(WordView w) const override;
  double inf_g() const override;
  void visit_contexts(std::size_t n, const WordVisitor& visitor) const override;
  void visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const override;
  std::uint64_t count_contexts(std::size_t n) const override { return alphabet().word_count(n); }
  std::uint64_t count_discontinuity_prefixes(std::size_t n) const override { return alphabet().word_count(n); }
  bool is_context_suffix(WordView) const override { return true; }
  std::unique_ptr<Walker> walker(const AnchoredPast& p) const override;
  std::optional<double> growth_certificate() const override { return 2.0; }
  std::optional<SupProduct> pressure_limit() const override { return SupProduct{0.0, true}; }
  SupProduct log_pressure_sum(std::size_t n, std::size_t cap) const override;

 private:
  double dense_;
  double sparse_;
  double threshold_;
};

// The g-function of the image of the i.i.d. spin measure with mu(-1) = epsilon
// under y_i = x_{i-1} x_i.  Alphabet "-+".
class SpinFlipFactor : public GModel {
 public:
  explicit SpinFlipFactor(double epsilon);

  double epsilon() const noexcept { return eps_; }

  /// Class of a past: -1, 0 or +1 as the density of +1 among its backward
  /// partial products is below, at, or above one half.
  int density_class(const AnchoredPast& p) const;
  double prob_plus(int cls) const;

  /// nu(y) for a word of length n+1.
  double factor_cylinder(WordView y) const;
  /// nu(y_0 = + | y_{-n}^{-1}) through the closed form in rho = eps/(1-eps).
  double conditional_plus(WordView past_word) const;
  /// y_i = x_{i-1} x_i, so |y| = |x| - 1.
  static Word image(WordView x);

  std::string family() const override { return "spinflip"; }
  nlohmann::json descriptor() const override;
  double eval(const AnchoredPast& p, Symbol a) const override;
  ContextLength context_length(const AnchoredPast&) const override { return std::nullopt; }
  double variation(const AnchoredPast& p, std::size_t l) const override;
  SupProduct sup_gn(WordView w) const override;
  double inf_g() const override;
  void visit_contexts(std::size_t n, const WordVisitor& visitor) const override;
  void visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const override;
  std::uint64_t count_contexts(std::size_t n) const override { return alphabet().word_count(n); }
  std::uint64_t count_discontinuity_prefixes(std::size_t n) const override { return alphabet().word_count(n); }
  bool is_context_suffix(WordView) const override { return true; }
  std::unique_ptr<Walker> walker(const AnchoredPast& p) const override;
  std::optional<double> growth_certificate() const override { return 2.0; }
  std::optional<SupProduct> pressure_limit() const override { return SupProduct{0.0, true}; }
  SupProduct log_pressure_sum(std::size_t n, std::size_t cap) const override;

 private:
  double eps_;
};

// Context tree grown around one infinite "trunk" past; at the end of the k-th
// coded block a branch splits off and continues with a constant symbol forever.
class TrunkTreeModel : public GModel {
 public:
  explicit TrunkTreeModel(double epsilon, std::size_t trunk_length = 1u << 14);

  double epsilon() const noexcept { return eps_; }

  struct Branch {
    std::size_t block_end;   // |w(k)|
    std::size_t split;       // depth d_k of the first node off the trunk
    Symbol symbol;           // the constant the branch continues with
  };

  /// Trunk symbol at backward depth j >= 1.
  Symbol trunk(std::size_t j) const;
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  /// Branch whose split depth is d, if any.
  const Branch* branch_at(std::size_t split) const;

  // Walk of a backward-read word through the internal nodes.  `matched` counts
  // symbols read while staying internal; `infinite` is set when the walk never ends.
  struct Walk {
    std::size_t matched = 0;
    bool infinite = false;
  };
  Walk walk(const AnchoredPast& p) const;
  Walk walk_from_trunk(const AnchoredPast& p, std::size_t depth) const;

  std::string family() const override { return "trunk"; }
  nlohmann::json descriptor() const override;
  double eval(const AnchoredPast& p, Symbol a) const override;
  ContextLength context_length(const AnchoredPast& p) const override;
  double variation(const AnchoredPast& p, std::size_t l) const override;
  SupProduct sup_gn(WordView w) const override;
  double inf_g() const override { return eps_; }
  void visit_contexts(std::size_t n, const WordVisitor& visitor) const override;
  void visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const override {
    visit_contexts(n, visitor);
  }
  std::uint64_t count_contexts(std::size_t n) const override;
  std::uint64_t count_discontinuity_prefixes(std::size_t n) const override { return count_contexts(n); }
  bool is_context_suffix(WordView word) const override;
  std::unique_ptr<Walker> walker(const AnchoredPast& p) const override;
  std::optional<double> growth_certificate() const override { return 1.0; }
  std::optional<SupProduct> pressure_limit() const override;
  SupProduct log_pressure_sum(std::size_t n, std::size_t cap) const override;

  /// p(1) for a leaf hanging at the given depth.
  double leaf_prob_one(std::size_t depth) const { return ((depth - 1) % 2 == 0) ? eps_ : 1.0 - eps_; }
  double prob_one(const Walk& w) const { return w.infinite ? eps_ : leaf_prob_one(w.matched + 1); }

 private:
  void check_depth(std::size_t j) const;

  double eps_;
  Word trunk_;  // trunk_[j-1] is the symbol at depth j
  std::vector<Branch> branches_;
};

std::unique_ptr<GModel> model_from_json(const nlohmann::json& j);

}  // namespace gmeasure
