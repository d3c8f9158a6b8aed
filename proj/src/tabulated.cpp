#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "gmeasure/models.hpp"

namespace gmeasure {

namespace {

void check_distribution(const std::vector<double>& d, std::size_t size, const std::string& what) {
  require(d.size() == size, what + ": distribution has the wrong number of entries");
  double s = 0.0;
  for (double v : d) {
    require(v >= 0.0 && v <= 1.0, what + ": probabilities must lie in [0,1]");
    s += v;
  }
  require(std::abs(s - 1.0) <= 1e-12, what + ": distribution does not sum to 1");
}

class TreeWalker : public Walker {
 public:
  TreeWalker(const TabulatedTree& m, Word recent) : m_(&m), recent_(std::move(recent)) {}
  double prob(Symbol a) const override { return (*m_->lookup_backward(recent_).first)[a]; }
  void push(Symbol a) override {
    if (recent_.empty()) return;
    std::rotate(recent_.rbegin(), recent_.rbegin() + 1, recent_.rend());
    recent_[0] = a;
  }
  std::unique_ptr<Walker> clone() const override { return std::make_unique<TreeWalker>(*this); }
  std::optional<StateKey> key(std::size_t) const override { return StateKey(recent_.begin(), recent_.end()); }

 private:
  const TabulatedTree* m_;
  Word recent_;  // most recent first
};

}  // namespace

TabulatedTree::TabulatedTree(Alphabet alphabet, std::map<Word, std::vector<double>> contexts,
                             std::optional<std::vector<double>> fallback)
    : GModel(std::move(alphabet)), contexts_(std::move(contexts)), fallback_(std::move(fallback)) {
  const std::size_t A = this->alphabet().size();
  require(!contexts_.empty() || fallback_, "tabulated tree needs contexts or a default distribution");
  if (fallback_) check_distribution(*fallback_, A, "default");
  nodes_.push_back(Node{std::vector<std::int32_t>(A, -1), -1, 0});
  for (const auto& [ctx, dist] : contexts_) {
    const std::string name = this->alphabet().format(ctx);
    require(!ctx.empty(), "contexts must be nonempty words");
    check_distribution(dist, A, "context " + name);
    std::int32_t node = 0;
    for (std::size_t t = ctx.size(); t-- > 0;) {
      require(nodes_[node].leaf < 0, "contexts are not a suffix antichain (at " + name + ")");
      std::int32_t& c = nodes_[node].child[ctx[t]];
      if (c < 0) {
        c = static_cast<std::int32_t>(nodes_.size());
        const std::size_t d = nodes_[node].depth + 1;
        nodes_.push_back(Node{std::vector<std::int32_t>(A, -1), -1, d});
      }
      node = nodes_[node].child[ctx[t]];
    }
    const bool has_children = std::any_of(nodes_[node].child.begin(), nodes_[node].child.end(),
                                          [](std::int32_t c) { return c >= 0; });
    require(!has_children, "contexts are not a suffix antichain (at " + name + ")");
    nodes_[node].leaf = static_cast<std::int32_t>(leaf_dist_.size());
    leaf_dist_.push_back(dist);
    depth_ = std::max(depth_, ctx.size());
  }
  if (!fallback_) {
    for (const auto& n : nodes_) {
      if (n.leaf >= 0) continue;
      require(std::all_of(n.child.begin(), n.child.end(), [](std::int32_t c) { return c >= 0; }),
              "context set is incomplete and no default distribution was given");
    }
  }
}

std::pair<const std::vector<double>*, std::size_t> TabulatedTree::lookup_backward(WordView backward) const {
  std::int32_t node = 0;
  std::size_t depth = 0;
  while (true) {
    const Node& n = nodes_[node];
    if (n.leaf >= 0) return {&leaf_dist_[n.leaf], depth};
    const std::int32_t c = depth < backward.size() ? n.child[backward[depth]] : -1;
    if (c < 0) return {&*fallback_, depth + 1};
    node = c;
    ++depth;
  }
}

std::pair<const std::vector<double>*, std::size_t> TabulatedTree::lookup(const AnchoredPast& p) const {
  Word backward(depth_);
  for (std::size_t j = 0; j < depth_; ++j) backward[j] = p.back(j + 1);
  return lookup_backward(backward);
}

nlohmann::json TabulatedTree::descriptor() const {
  nlohmann::json ctx = nlohmann::json::object();
  for (const auto& [w, d] : contexts_) ctx[alphabet().format(w)] = d;
  nlohmann::json j{{"family", family()}, {"alphabet", alphabet().glyphs()}, {"contexts", ctx}};
  if (fallback_) j["default"] = *fallback_;
  return j;
}

double TabulatedTree::eval(const AnchoredPast& p, Symbol a) const {
  check_symbol(a);
  return (*lookup(p).first)[a];
}

ContextLength TabulatedTree::context_length(const AnchoredPast& p) const { return lookup(p).second; }

void TabulatedTree::collect_oscillation(std::int32_t node, std::vector<double>& lo, std::vector<double>& hi) const {
  const Node& n = nodes_[node];
  auto absorb = [&](const std::vector<double>& d) {
    for (std::size_t a = 0; a < d.size(); ++a) {
      lo[a] = std::min(lo[a], d[a]);
      hi[a] = std::max(hi[a], d[a]);
    }
  };
  if (n.leaf >= 0) {
    absorb(leaf_dist_[n.leaf]);
    return;
  }
  for (std::int32_t c : n.child) {
    if (c >= 0)
      collect_oscillation(c, lo, hi);
    else
      absorb(*fallback_);
  }
}

double TabulatedTree::variation(const AnchoredPast& p, std::size_t l) const {
  require(l >= 1, "variation order starts at 1");
  std::int32_t node = 0;
  for (std::size_t d = 0; d < l; ++d) {
    if (nodes_[node].leaf >= 0) return 0.0;
    node = nodes_[node].child[p.back(d + 1)];
    if (node < 0) return 0.0;
  }
  if (nodes_[node].leaf >= 0) return 0.0;
  const std::size_t A = alphabet().size();
  std::vector<double> lo(A, 1.0), hi(A, 0.0);
  collect_oscillation(node, lo, hi);
  double v = 0.0;
  for (std::size_t a = 0; a < A; ++a) v = std::max(v, hi[a] - lo[a]);
  return v;
}

SupProduct TabulatedTree::sup_gn(WordView w) const {
  for (Symbol a : w) check_symbol(a);
  const std::uint64_t tails = alphabet().word_count(depth_);
  if (tails > (1ull << 22))
    fail(ErrorCode::kResourceCap, "tabulated sup_gn would enumerate more than 2^22 tails");
  double best = kLogZero;
  for (std::uint64_t r = 0; r < tails; ++r) {
    const AnchoredPast p(Word{0}, alphabet().unrank(r, depth_));
    best = std::max(best, g_n_log(p, w));
  }
  return {best, true};
}

double TabulatedTree::inf_g() const {
  double m = 1.0;
  for (const auto& d : leaf_dist_) m = std::min(m, *std::min_element(d.begin(), d.end()));
  if (fallback_) m = std::min(m, *std::min_element(fallback_->begin(), fallback_->end()));
  return m;
}

void TabulatedTree::visit_contexts(std::size_t n, const WordVisitor& visitor) const {
  Word backward;
  std::function<void(std::int32_t)> dfs = [&](std::int32_t node) {
    const Node& nd = nodes_[node];
    if (nd.leaf >= 0) return;
    if (nd.depth == n) {
      Word forward(backward.rbegin(), backward.rend());
      visitor(forward);
      return;
    }
    for (std::size_t a = 0; a < nd.child.size(); ++a) {
      if (nd.child[a] < 0) continue;
      backward.push_back(static_cast<Symbol>(a));
      dfs(nd.child[a]);
      backward.pop_back();
    }
  };
  dfs(0);
}

bool TabulatedTree::is_context_suffix(WordView word) const {
  std::int32_t node = 0;
  for (std::size_t t = word.size(); t-- > 0;) {
    if (nodes_[node].leaf >= 0) return false;
    node = nodes_[node].child[word[t]];
    if (node < 0) return false;
  }
  return nodes_[node].leaf < 0;
}

std::unique_ptr<Walker> TabulatedTree::walker(const AnchoredPast& p) const {
  Word recent(depth_);
  for (std::size_t j = 0; j < depth_; ++j) recent[j] = p.back(j + 1);
  return std::make_unique<TreeWalker>(*this, std::move(recent));
}

std::optional<SupProduct> TabulatedTree::pressure_limit() const { return SupProduct{kLogZero, true}; }

}  // namespace gmeasure
