#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gmeasure/gmodel.hpp"

namespace gmeasure {

inline constexpr std::size_t kDefaultBreakpointHorizon = std::size_t{1} << 20;

// Target growth f : N -> N*.  Values may be astronomically large, so the rule
// also answers comparisons against powers of two exactly.
class GrowthRule {
 public:
  enum class Kind { kPower2, kIdentity, kConstant, kPow2OverLog2, kTable };

  static GrowthRule power2();
  static GrowthRule identity();
  static GrowthRule constant(std::uint64_t c);
  /// ceil(2^n / floor(log2(n+2)))
  static GrowthRule pow2_over_log2();
  /// f(n) = values[n-1], then the last value repeated
  static GrowthRule table(std::vector<std::uint64_t> values);

  Kind kind() const noexcept { return kind_; }
  /// Saturates at UINT64_MAX.
  std::uint64_t operator()(std::size_t n) const;
  /// Largest j with f(n) >= 2^j.
  std::int64_t floor_log2(std::size_t n) const;
  /// Smallest j with f(n) <= 2^j.
  std::int64_t ceil_log2(std::size_t n) const;

  nlohmann::json to_json() const;
  static GrowthRule from_json(const nlohmann::json& j);

 private:
  GrowthRule(Kind k, std::uint64_t c = 0) : kind_(k), c_(c) {}
  bool exact(std::size_t n) const;

  Kind kind_;
  std::uint64_t c_ = 0;
  std::vector<std::uint64_t> table_;
};

/// n_k = least n with f(m) >= 2^k for every m in [n, horizon], made strictly increasing.
/// Only breakpoints up to `max_depth` are returned.
std::vector<std::size_t> breakpoints_tree1(const GrowthRule& f, std::size_t max_depth,
                                           std::size_t horizon = kDefaultBreakpointHorizon);
/// n_k = least n with f(m) <= 2^{m-k} for every m in [n, horizon], k >= 1.
std::vector<std::size_t> breakpoints_tree2(const GrowthRule& f, std::size_t max_depth,
                                           std::size_t horizon = kDefaultBreakpointHorizon);

// A binary set of pasts given by its length-n prefix sets, words read
// backward (index 0 is position -1).
//
// tree1: positions -1..-(n_1-1) are 0, then each block of depths
// [n_k, n_{k+1}) is constant.  d(n) = 2^k for n_k <= n < n_{k+1}.
//
// tree2: at each breakpoint depth n_k, the words still free that carry a 0
// there are frozen and continue with zeros; those with a 1 keep branching.
// d(n) = 2^{n-k} + sum_{i<=k} 2^{n_i - i} with k = #{i : n_i < n}.
class BuiltTree : public PrefixFamily {
 public:
  enum class Kind { kTree1, kTree2 };
  // kExact: after building a level, add the lexicographically smallest missing
  // children or withdraw the largest ones (never a parent's last child) until
  // the level has exactly f(n) words.
  enum class Adjust { kNone, kExact };

  BuiltTree(Kind kind, std::vector<std::size_t> breakpoints, std::optional<GrowthRule> f = std::nullopt,
            Adjust adjust = Adjust::kNone);

  static BuiltTree tree1(const GrowthRule& f, std::size_t max_depth, bool exact = false);
  static BuiltTree tree2(const GrowthRule& f, std::size_t max_depth, bool exact = false);
  /// n_1 = 2, n_2 = 4, n_3 = 7.
  static BuiltTree figure2();

  Kind kind() const noexcept { return kind_; }
  Adjust adjust() const noexcept { return adjust_; }
  const std::vector<std::size_t>& breakpoints() const noexcept { return bps_; }
  const std::optional<GrowthRule>& rule() const noexcept { return f_; }

  /// Is the backward word a prefix of an element of the unadjusted construction?
  bool member(WordView backward) const;
  /// d(n) of the unadjusted construction.
  std::uint64_t closed_form(std::size_t n) const;
  /// Prefix sets for n = 0..N after adjustment, as ranks of backward words
  /// (bit n-1-j holds the symbol at depth j+1), sorted.
  std::vector<std::vector<std::uint64_t>> levels(std::size_t N) const;

  std::size_t alphabet_size() const override { return 2; }
  /// Words in time order.
  void visit(std::size_t n, const WordVisitor& visitor) const override;
  std::uint64_t count(std::size_t n) const override;

 private:
  Kind kind_;
  std::vector<std::size_t> bps_;
  std::optional<GrowthRule> f_;
  Adjust adjust_;
};

std::string tree_kind_name(BuiltTree::Kind k);

struct CrosscheckRow {
  std::size_t n = 0;
  std::uint64_t enumerated = 0;
  std::uint64_t closed_form = 0;
  std::uint64_t adjusted = 0;
  std::optional<std::uint64_t> target;
};

/// Brute-force d(n) against the closed form for n = 0..N; throws
/// kConstructionMismatch on any disagreement, including a missed target or a
/// level that is not the prefix projection of the next.
std::vector<CrosscheckRow> growth_crosscheck(const BuiltTree& bt, std::size_t N);

}  // namespace gmeasure
