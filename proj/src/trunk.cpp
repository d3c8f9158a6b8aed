#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "gmeasure/models.hpp"

namespace gmeasure {

namespace {

std::size_t run_length(const AnchoredPast& p, std::size_t from, Symbol a, bool& infinite) {
  infinite = p.constant_from(from, a);
  if (infinite) return 0;
  std::size_t j = from;
  while (p.back(j) == a) ++j;
  return j - from;
}

// Two walkers agreeing on the first key-length backward symbols take the same
// path through the internal nodes for every continuation of the given horizon.
class TrunkWalker : public Walker {
 public:
  TrunkWalker(const TrunkTreeModel& m, AnchoredPast past) : m_(&m), past_(std::move(past)) {}

  double prob(Symbol a) const override {
    const double p1 = m_->prob_one(m_->walk(past_));
    return a == 1 ? p1 : 1.0 - p1;
  }
  void push(Symbol a) override { past_.push_back(a); }
  std::unique_ptr<Walker> clone() const override { return std::make_unique<TrunkWalker>(*this); }

  std::optional<StateKey> key(std::size_t horizon) const override {
    bool inf0 = false, inf1 = false;
    const std::size_t run0 = run_length(past_, 1, 0, inf0);
    const std::size_t run1 = run_length(past_, 1, 1, inf1);
    std::size_t need = 0;
    bool infinite = false;
    for (std::size_t s = 0; s <= horizon && !infinite; ++s) {
      const auto w = m_->walk_from_trunk(past_, s);
      infinite = w.infinite;
      need = std::max(need, w.matched);
      for (const auto& b : m_->branches()) {
        if (b.split > s) break;
        if (b.symbol == 0) {
          infinite = infinite || inf0;
          need = std::max(need, run0);
        } else {
          infinite = infinite || inf1;
          need = std::max(need, run1);
        }
      }
    }
    StateKey k;
    if (infinite) {
      k.push_back(-1);
      k.push_back(static_cast<std::int64_t>(past_.period().size()));
      k.insert(k.end(), past_.period().begin(), past_.period().end());
      k.insert(k.end(), past_.suffix().begin(), past_.suffix().end());
      return k;
    }
    for (std::size_t j = 1; j <= need + 1; ++j) k.push_back(past_.back(j));
    return k;
  }

 private:
  const TrunkTreeModel* m_;
  AnchoredPast past_;
};

}  // namespace

TrunkTreeModel::TrunkTreeModel(double epsilon, std::size_t trunk_length) : GModel(Alphabet::binary()), eps_(epsilon) {
  require(eps_ > 0.0 && eps_ < 0.5, "trunk epsilon must lie in (0, 1/2)");
  require(trunk_length >= 16, "trunk length too short");
  // backward reading: the binary words 0, 1, 00, 01, 10, 11, 000, ... one after another
  std::vector<std::size_t> block_ends;
  for (std::size_t len = 1; trunk_.size() < trunk_length; ++len) {
    for (std::uint64_t v = 0; v < (1ull << len) && trunk_.size() < trunk_length; ++v) {
      for (std::size_t b = len; b-- > 0;) trunk_.push_back(static_cast<Symbol>((v >> b) & 1u));
      if (trunk_.size() <= trunk_length) block_ends.push_back(trunk_.size());
    }
  }
  trunk_.resize(trunk_length);
  for (std::size_t end : block_ends) {
    const Symbol a = trunk_[end - 1];
    std::size_t d = end + 1;
    while (d <= trunk_.size() && trunk_[d - 1] == a) ++d;
    if (d > trunk_.size()) break;
    if (!branches_.empty())
      require(d > branches_.back().split, "trunk construction produced non-increasing split depths");
    branches_.push_back(Branch{end, d, a});
  }
}

void TrunkTreeModel::check_depth(std::size_t j) const {
  if (j > trunk_.size())
    fail(ErrorCode::kResourceCap, "trunk walk deeper than the precomputed trunk (" +
                                      std::to_string(trunk_.size()) + " symbols)");
}

Symbol TrunkTreeModel::trunk(std::size_t j) const {
  check_depth(j);
  return trunk_[j - 1];
}

const TrunkTreeModel::Branch* TrunkTreeModel::branch_at(std::size_t split) const {
  const auto it = std::lower_bound(branches_.begin(), branches_.end(), split,
                                   [](const Branch& b, std::size_t d) { return b.split < d; });
  if (it == branches_.end() || it->split != split) return nullptr;
  return &*it;
}

TrunkTreeModel::Walk TrunkTreeModel::walk_from_trunk(const AnchoredPast& p, std::size_t depth) const {
  // start at the trunk node of the given depth and read p backward
  std::size_t t = 0;
  while (p.back(t + 1) == trunk(depth + t + 1)) ++t;
  const std::size_t m = depth + t + 1;  // depth of the first node off the trunk
  const Branch* b = branch_at(m);
  if (!b) return {t, false};
  bool infinite = false;
  const std::size_t extra = run_length(p, t + 2, b->symbol, infinite);
  if (infinite) return {0, true};
  return {t + 1 + extra, false};
}

TrunkTreeModel::Walk TrunkTreeModel::walk(const AnchoredPast& p) const { return walk_from_trunk(p, 0); }

nlohmann::json TrunkTreeModel::descriptor() const {
  return {{"family", family()}, {"epsilon", eps_}, {"trunk_length", trunk_.size()}};
}

double TrunkTreeModel::eval(const AnchoredPast& p, Symbol a) const {
  check_symbol(a);
  const double p1 = prob_one(walk(p));
  return a == 1 ? p1 : 1.0 - p1;
}

ContextLength TrunkTreeModel::context_length(const AnchoredPast& p) const {
  const Walk w = walk(p);
  if (w.infinite) return std::nullopt;
  return w.matched + 1;
}

double TrunkTreeModel::variation(const AnchoredPast& p, std::size_t l) const {
  require(l >= 1, "variation order starts at 1");
  const auto len = context_length(p);
  if (len && l >= *len) return 0.0;
  // below any internal node hang leaves of both parities
  return 1.0 - 2.0 * eps_;
}

SupProduct TrunkTreeModel::sup_gn(WordView w) const {
  for (Symbol a : w) check_symbol(a);
  return {static_cast<double>(w.size()) * std::log1p(-eps_), false};
}

void TrunkTreeModel::visit_contexts(std::size_t n, const WordVisitor& visitor) const {
  check_depth(n);
  Word backward(trunk_.begin(), trunk_.begin() + static_cast<std::ptrdiff_t>(n));
  visitor(Word(backward.rbegin(), backward.rend()));
  for (const auto& b : branches_) {
    if (b.split > n) break;
    for (std::size_t j = b.block_end; j < n; ++j) backward[j] = b.symbol;
    visitor(Word(backward.rbegin(), backward.rend()));
    std::copy(trunk_.begin() + static_cast<std::ptrdiff_t>(b.block_end),
              trunk_.begin() + static_cast<std::ptrdiff_t>(n),
              backward.begin() + static_cast<std::ptrdiff_t>(b.block_end));
  }
}

std::uint64_t TrunkTreeModel::count_contexts(std::size_t n) const {
  check_depth(n);
  std::uint64_t c = 1;
  for (const auto& b : branches_) {
    if (b.split > n) break;
    ++c;
  }
  return c;
}

bool TrunkTreeModel::is_context_suffix(WordView word) const {
  const std::size_t n = word.size();
  check_depth(n);
  std::size_t j = 1;
  while (j <= n && word[n - j] == trunk_[j - 1]) ++j;
  if (j > n) return true;
  const Branch* b = branch_at(j);
  if (!b) return false;
  for (; j <= n; ++j)
    if (word[n - j] != b->symbol) return false;
  return true;
}

std::unique_ptr<Walker> TrunkTreeModel::walker(const AnchoredPast& p) const {
  return std::make_unique<TrunkWalker>(*this, p);
}

std::optional<SupProduct> TrunkTreeModel::pressure_limit() const {
  // at most n+1 prefixes, each carrying at most (1 - eps)^n
  return SupProduct{std::log1p(-eps_), false};
}

SupProduct TrunkTreeModel::log_pressure_sum(std::size_t n, std::size_t cap) const {
  (void)cap;
  return {std::log(static_cast<double>(count_contexts(n))) + static_cast<double>(n) * std::log1p(-eps_), false};
}

}  // namespace gmeasure
