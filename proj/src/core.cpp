#include "gmeasure/core.hpp"

#include <algorithm>
#include <numeric>

namespace gmeasure {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kValidation: return "validation";
    case ErrorCode::kResourceCap: return "resource_cap";
    case ErrorCode::kOrderingViolated: return "ordering_violated";
    case ErrorCode::kConstructionMismatch: return "construction_mismatch";
    case ErrorCode::kCapability: return "capability_absent";
    case ErrorCode::kNotApplicable: return "not_applicable";
    case ErrorCode::kUndefinedResidual: return "undefined_residual";
  }
  return "unknown";
}

std::string format_context_length(const ContextLength& len) {
  return len ? std::to_string(*len) : std::string("inf");
}

Alphabet::Alphabet(std::string glyphs) : glyphs_(std::move(glyphs)) {
  require(glyphs_.size() >= 2, "alphabet needs at least two symbols");
  require(glyphs_.size() <= 255, "alphabet too large");
  std::string sorted = glyphs_;
  std::sort(sorted.begin(), sorted.end());
  require(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end(),
          "alphabet glyphs must be distinct");
  require(glyphs_.find_first_of("()") == std::string::npos,
          "parentheses are reserved by the past encoding");
}

Alphabet Alphabet::binary() { return Alphabet("01"); }
Alphabet Alphabet::spin() { return Alphabet("-+"); }

char Alphabet::glyph(Symbol s) const {
  require(contains(s), "symbol outside alphabet");
  return glyphs_[s];
}

Symbol Alphabet::symbol(char g) const {
  const auto pos = glyphs_.find(g);
  require(pos != std::string::npos, std::string("glyph '") + g + "' not in alphabet \"" + glyphs_ + "\"");
  return static_cast<Symbol>(pos);
}

Word Alphabet::parse(std::string_view text) const {
  Word w;
  w.reserve(text.size());
  for (char c : text) w.push_back(symbol(c));
  return w;
}

std::string Alphabet::format(WordView w) const {
  std::string out;
  out.reserve(w.size());
  for (Symbol s : w) out.push_back(glyph(s));
  return out;
}

std::uint64_t Alphabet::word_count(std::size_t n) const {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < n; ++i) {
    if (c > std::numeric_limits<std::uint64_t>::max() / size()) return std::numeric_limits<std::uint64_t>::max();
    c *= size();
  }
  return c;
}

std::uint64_t Alphabet::rank(WordView w) const {
  std::uint64_t r = 0;
  for (Symbol s : w) r = r * size() + s;
  return r;
}

Word Alphabet::unrank(std::uint64_t index, std::size_t n) const {
  Word w(n);
  for (std::size_t t = n; t-- > 0;) {
    w[t] = static_cast<Symbol>(index % size());
    index /= size();
  }
  return w;
}

Word primitive_root(WordView w) {
  const std::size_t n = w.size();
  for (std::size_t d = 1; d <= n; ++d) {
    if (n % d != 0) continue;
    bool ok = true;
    for (std::size_t i = d; i < n && ok; ++i) ok = w[i] == w[i - d];
    if (ok) return Word(w.begin(), w.begin() + static_cast<std::ptrdiff_t>(d));
  }
  return Word(w.begin(), w.end());
}

AnchoredPast::AnchoredPast(Word period, Word suffix)
    : period_(std::move(period)), suffix_(std::move(suffix)) {
  require(!period_.empty(), "anchored past needs a nonempty period");
  canonicalize();
}

void AnchoredPast::canonicalize() {
  period_ = primitive_root(period_);
  // ...P P s0 s1 ... with s0 == P[0] is ...P' P' s1 ... where P' = rot(P).
  std::size_t absorbed = 0;
  while (absorbed < suffix_.size() && suffix_[absorbed] == period_[0]) {
    std::rotate(period_.begin(), period_.begin() + 1, period_.end());
    ++absorbed;
  }
  suffix_.erase(suffix_.begin(), suffix_.begin() + static_cast<std::ptrdiff_t>(absorbed));
}

AnchoredPast AnchoredPast::parse(const Alphabet& alphabet, std::string_view text) {
  require(!text.empty() && text.front() == '(', "past encoding must look like (period)suffix");
  const auto close = text.find(')');
  require(close != std::string_view::npos && close > 1, "past encoding needs a nonempty (period)");
  return AnchoredPast(alphabet.parse(text.substr(1, close - 1)), alphabet.parse(text.substr(close + 1)));
}

std::string AnchoredPast::to_string(const Alphabet& alphabet) const {
  return "(" + alphabet.format(period_) + ")" + alphabet.format(suffix_);
}

Symbol AnchoredPast::at(std::int64_t i) const {
  require(i <= -1, "past positions are negative");
  return back(static_cast<std::size_t>(-i));
}

AnchoredPast AnchoredPast::appended(WordView w) const {
  AnchoredPast out = *this;
  for (Symbol s : w) out.push_back(s);
  return out;
}

void AnchoredPast::push_back(Symbol s) {
  if (suffix_.empty() && s == period_[0]) {
    std::rotate(period_.begin(), period_.begin() + 1, period_.end());
    return;
  }
  suffix_.push_back(s);
}

double AnchoredPast::upper_density(Symbol one) const {
  const auto hits = std::count(period_.begin(), period_.end(), one);
  return static_cast<double>(hits) / static_cast<double>(period_.size());
}

bool AnchoredPast::constant_from(std::size_t j, Symbol a) const noexcept {
  if (std::any_of(period_.begin(), period_.end(), [a](Symbol s) { return s != a; })) return false;
  for (std::size_t k = j; k <= suffix_.size(); ++k)
    if (back(k) != a) return false;
  return true;
}

std::optional<std::size_t> AnchoredPast::distance_to(Symbol a) const noexcept {
  for (std::size_t j = 1; j <= suffix_.size(); ++j)
    if (back(j) == a) return j;
  for (std::size_t t = 1; t <= period_.size(); ++t)
    if (back(suffix_.size() + t) == a) return suffix_.size() + t;
  return std::nullopt;
}

Word AnchoredPast::tail_word(std::size_t n) const {
  Word w(n);
  for (std::size_t j = 1; j <= n; ++j) w[n - j] = back(j);
  return w;
}

bool dominates(const AnchoredPast& p, const AnchoredPast& q) {
  // Both are eventually periodic, so agreement over one joint period past both suffixes settles it.
  const std::size_t horizon = p.suffix().size() + q.suffix().size() +
                              std::lcm(p.period().size(), q.period().size());
  for (std::size_t j = 1; j <= horizon; ++j)
    if (p.back(j) < q.back(j)) return false;
  return true;
}

}  // namespace gmeasure
