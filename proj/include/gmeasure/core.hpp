#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gmeasure/error.hpp"

namespace gmeasure {

using Symbol = std::uint8_t;
using Word = std::vector<Symbol>;
using WordView = std::span<const Symbol>;

/// Probabilities travel as plain doubles; long products are kept as logs.
using Prob = double;
using LogWeight = double;

inline constexpr LogWeight kLogZero = -std::numeric_limits<double>::infinity();

/// nullopt stands for an infinite context.
using ContextLength = std::optional<std::size_t>;

std::string format_context_length(const ContextLength& len);

class Alphabet {
 public:
  /// One printable glyph per symbol, in enumeration order.
  explicit Alphabet(std::string glyphs);

  static Alphabet binary();  // "01"
  static Alphabet spin();    // "-+", so index 0 is -1 and index 1 is +1

  std::size_t size() const noexcept { return glyphs_.size(); }
  const std::string& glyphs() const noexcept { return glyphs_; }
  char glyph(Symbol s) const;
  Symbol symbol(char glyph) const;
  bool contains(Symbol s) const noexcept { return s < glyphs_.size(); }

  Word parse(std::string_view text) const;
  std::string format(WordView w) const;

  /// Number of words of length n, saturating at UINT64_MAX.
  std::uint64_t word_count(std::size_t n) const;
  /// Lexicographic rank of w among words of its length.
  std::uint64_t rank(WordView w) const;
  Word unrank(std::uint64_t index, std::size_t n) const;

  bool operator==(const Alphabet& other) const = default;

 private:
  std::string glyphs_;
};

// Left-infinite sequence ...period period suffix, with suffix occupying -|suffix|..-1.
// Kept canonical: the period is a primitive word and the suffix never starts with
// a copy of the period's first symbol that could be absorbed into the tail.
class AnchoredPast {
 public:
  AnchoredPast(Word period, Word suffix = {});

  static AnchoredPast parse(const Alphabet& alphabet, std::string_view text);
  std::string to_string(const Alphabet& alphabet) const;

  const Word& period() const noexcept { return period_; }
  const Word& suffix() const noexcept { return suffix_; }

  /// Symbol at position i, i <= -1.
  Symbol at(std::int64_t i) const;
  /// Symbol at position -j, j >= 1.  No bounds check on j beyond j >= 1.
  Symbol back(std::size_t j) const noexcept {
    if (j <= suffix_.size()) return suffix_[suffix_.size() - j];
    const std::size_t t = (j - suffix_.size() - 1) % period_.size();
    return period_[period_.size() - 1 - t];
  }

  AnchoredPast appended(WordView w) const;
  void push_back(Symbol s);

  /// Frequency of `one` in the period: the limit of backward averages.
  double upper_density(Symbol one) const;

  /// True when every position -j, -j-1, ... holds `a`.
  bool constant_from(std::size_t j, Symbol a) const noexcept;

  /// Distance to the nearest occurrence of `a` looking backward, if any.
  std::optional<std::size_t> distance_to(Symbol a) const noexcept;

  /// Last n symbols in time order.
  Word tail_word(std::size_t n) const;

  bool operator==(const AnchoredPast& other) const = default;
  auto operator<=>(const AnchoredPast& other) const = default;

 private:
  void canonicalize();

  Word period_;
  Word suffix_;
};

/// Primitive root of a nonempty word.
Word primitive_root(WordView w);

/// Coordinatewise comparison p >= q for every position (symbols compared by index).
bool dominates(const AnchoredPast& p, const AnchoredPast& q);

}  // namespace gmeasure
