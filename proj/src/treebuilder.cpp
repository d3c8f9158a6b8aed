#include "gmeasure/treebuilder.hpp"

#include <algorithm>
#include <bit>
#include <limits>

#include <nlohmann/json.hpp>

namespace gmeasure {

namespace {

constexpr std::uint64_t kSat = std::numeric_limits<std::uint64_t>::max();

std::uint64_t floor_log2_int(std::size_t n) { return std::bit_width(static_cast<std::uint64_t>(n + 2)) - 1; }

Word decode_backward(std::uint64_t rank, std::size_t n) {
  Word y(n);
  for (std::size_t j = 0; j < n; ++j) y[j] = static_cast<Symbol>((rank >> (n - 1 - j)) & 1u);
  return y;
}

// suffix minima of v over [n, horizon], indexed by n
std::vector<std::int64_t> suffix_min(std::vector<std::int64_t> v) {
  for (std::size_t i = v.size() - 1; i-- > 1;) v[i] = std::min(v[i], v[i + 1]);
  return v;
}

std::vector<std::size_t> thresholds(const std::vector<std::int64_t>& S, std::size_t max_depth) {
  std::vector<std::size_t> out;
  const std::size_t H = S.size() - 1;
  std::size_t n = 1;
  for (std::int64_t k = 1; S[H] >= k; ++k) {
    while (S[n] < k) ++n;
    const std::size_t nk = out.empty() ? n : std::max(n, out.back() + 1);
    if (nk > max_depth) break;
    out.push_back(nk);
  }
  return out;
}

}  // namespace

// ---- GrowthRule ----

GrowthRule GrowthRule::power2() { return GrowthRule(Kind::kPower2); }
GrowthRule GrowthRule::identity() { return GrowthRule(Kind::kIdentity); }
GrowthRule GrowthRule::constant(std::uint64_t c) {
  require(c >= 1, "growth values must be positive");
  return GrowthRule(Kind::kConstant, c);
}
GrowthRule GrowthRule::pow2_over_log2() { return GrowthRule(Kind::kPow2OverLog2); }
GrowthRule GrowthRule::table(std::vector<std::uint64_t> values) {
  require(!values.empty(), "growth table must be nonempty");
  for (auto v : values) require(v >= 1, "growth values must be positive");
  GrowthRule r(Kind::kTable);
  r.table_ = std::move(values);
  return r;
}

bool GrowthRule::exact(std::size_t n) const {
  return (kind_ != Kind::kPower2 && kind_ != Kind::kPow2OverLog2) || n < 63;
}

std::uint64_t GrowthRule::operator()(std::size_t n) const {
  require(n >= 1, "growth rules start at n = 1");
  switch (kind_) {
    case Kind::kPower2: return n < 64 ? std::uint64_t{1} << n : kSat;
    case Kind::kIdentity: return n;
    case Kind::kConstant: return c_;
    case Kind::kPow2OverLog2: {
      if (n >= 64) return kSat;
      const std::uint64_t L = floor_log2_int(n);
      const std::uint64_t p = std::uint64_t{1} << n;
      return p / L + (p % L != 0);
    }
    case Kind::kTable: return n <= table_.size() ? table_[n - 1] : table_.back();
  }
  return 0;
}

std::int64_t GrowthRule::floor_log2(std::size_t n) const {
  if (exact(n)) return static_cast<std::int64_t>(std::bit_width((*this)(n))) - 1;
  const auto N = static_cast<std::int64_t>(n);
  if (kind_ == Kind::kPower2) return N;
  const std::uint64_t L = floor_log2_int(n);
  return N - static_cast<std::int64_t>(std::bit_width(L - 1));
}

std::int64_t GrowthRule::ceil_log2(std::size_t n) const {
  if (exact(n)) {
    const std::uint64_t v = (*this)(n);
    return v == 1 ? 0 : static_cast<std::int64_t>(std::bit_width(v - 1));
  }
  const auto N = static_cast<std::int64_t>(n);
  if (kind_ == Kind::kPower2) return N;
  const std::uint64_t L = floor_log2_int(n);
  return N - (static_cast<std::int64_t>(std::bit_width(L)) - 1);
}

nlohmann::json GrowthRule::to_json() const {
  switch (kind_) {
    case Kind::kPower2: return {{"kind", "power2"}};
    case Kind::kIdentity: return {{"kind", "identity"}};
    case Kind::kConstant: return {{"kind", "constant"}, {"value", c_}};
    case Kind::kPow2OverLog2: return {{"kind", "pow2_over_log2"}};
    case Kind::kTable: return {{"kind", "table"}, {"values", table_}};
  }
  return {};
}

GrowthRule GrowthRule::from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind"), "growth rule needs a 'kind'");
  const std::string kind = j["kind"];
  auto only = [&](std::initializer_list<const char*> keys) {
    for (const auto& item : j.items())
      require(std::any_of(keys.begin(), keys.end(), [&](const char* k) { return item.key() == k; }),
              "unknown field '" + item.key() + "' in growth rule");
  };
  try {
    if (kind == "power2") return only({"kind"}), power2();
    if (kind == "identity") return only({"kind"}), identity();
    if (kind == "pow2_over_log2") return only({"kind"}), pow2_over_log2();
    if (kind == "constant") return only({"kind", "value"}), constant(j.at("value").get<std::uint64_t>());
    if (kind == "table") return only({"kind", "values"}), table(j.at("values").get<std::vector<std::uint64_t>>());
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kValidation, std::string("growth rule: ") + e.what());
  }
  fail(ErrorCode::kValidation, "unknown growth rule '" + kind + "'");
}

std::vector<std::size_t> breakpoints_tree1(const GrowthRule& f, std::size_t max_depth, std::size_t horizon) {
  require(horizon >= max_depth && horizon >= 2, "breakpoint horizon must cover the requested depth");
  if (f.kind() == GrowthRule::Kind::kConstant || f.kind() == GrowthRule::Kind::kTable)
    fail(ErrorCode::kValidation, "tree1 needs a diverging f; this rule is eventually constant");
  std::vector<std::int64_t> K(horizon + 1, std::numeric_limits<std::int64_t>::max());
  for (std::size_t m = 1; m <= horizon; ++m) K[m] = f.floor_log2(m);
  return thresholds(suffix_min(std::move(K)), max_depth);
}

std::vector<std::size_t> breakpoints_tree2(const GrowthRule& f, std::size_t max_depth, std::size_t horizon) {
  require(horizon >= max_depth && horizon >= 2, "breakpoint horizon must cover the requested depth");
  if (f.kind() == GrowthRule::Kind::kPower2) fail(ErrorCode::kValidation, "tree2 needs f(n) = o(2^n)");
  std::vector<std::int64_t> J(horizon + 1, std::numeric_limits<std::int64_t>::max());
  for (std::size_t m = 1; m <= horizon; ++m) {
    J[m] = static_cast<std::int64_t>(m) - f.ceil_log2(m);
    if (m <= max_depth) require(J[m] >= 0, "f(" + std::to_string(m) + ") exceeds 2^n");
  }
  return thresholds(suffix_min(std::move(J)), max_depth);
}

// ---- BuiltTree ----

BuiltTree::BuiltTree(Kind kind, std::vector<std::size_t> breakpoints, std::optional<GrowthRule> f, Adjust adjust)
    : kind_(kind), bps_(std::move(breakpoints)), f_(std::move(f)), adjust_(adjust) {
  for (std::size_t i = 0; i < bps_.size(); ++i) {
    require(bps_[i] >= 1, "breakpoints start at depth 1");
    require(i == 0 || bps_[i] > bps_[i - 1], "breakpoints must increase strictly");
  }
  require(adjust_ == Adjust::kNone || f_.has_value(), "exact growth needs a target rule");
}

BuiltTree BuiltTree::tree1(const GrowthRule& f, std::size_t max_depth, bool exact) {
  return BuiltTree(Kind::kTree1, breakpoints_tree1(f, max_depth), f, exact ? Adjust::kExact : Adjust::kNone);
}

BuiltTree BuiltTree::tree2(const GrowthRule& f, std::size_t max_depth, bool exact) {
  return BuiltTree(Kind::kTree2, breakpoints_tree2(f, max_depth), f, exact ? Adjust::kExact : Adjust::kNone);
}

BuiltTree BuiltTree::figure2() { return BuiltTree(Kind::kTree2, {2, 4, 7}); }

bool BuiltTree::member(WordView y) const {
  for (Symbol s : y) require(s <= 1, "appendix trees are binary");
  const std::size_t n = y.size();
  if (kind_ == Kind::kTree1) {
    const std::size_t first = bps_.empty() ? std::numeric_limits<std::size_t>::max() : bps_.front();
    std::size_t b = 0;  // index of the block holding depth d
    for (std::size_t d = 1; d <= n; ++d) {
      if (d < first) {
        if (y[d - 1] != 0) return false;
        continue;
      }
      while (b + 1 < bps_.size() && bps_[b + 1] <= d) ++b;
      if (d > bps_[b] && y[d - 1] != y[d - 2]) return false;
    }
    return true;
  }
  for (std::size_t b : bps_) {
    if (b >= n) break;
    if (y[b - 1] == 0) return std::all_of(y.begin() + static_cast<std::ptrdiff_t>(b), y.end(), [](Symbol s) { return s == 0; });
  }
  return true;
}

std::uint64_t BuiltTree::closed_form(std::size_t n) const {
  require(n < 63, "closed form overflows past depth 62");
  if (n == 0) return 1;
  if (kind_ == Kind::kTree1) {
    const auto k = std::count_if(bps_.begin(), bps_.end(), [&](std::size_t b) { return b <= n; });
    return std::uint64_t{1} << k;
  }
  std::size_t k = 0;
  std::uint64_t frozen = 0;
  while (k < bps_.size() && bps_[k] < n) {
    ++k;
    frozen += std::uint64_t{1} << (bps_[k - 1] - k);
  }
  return (std::uint64_t{1} << (n - k)) + frozen;
}

std::vector<std::vector<std::uint64_t>> BuiltTree::levels(std::size_t N) const {
  check_enumeration_cap(N, kDefaultEnumerationCap);
  std::vector<std::vector<std::uint64_t>> L(N + 1);
  L[0] = {0};
  for (std::size_t n = 1; n <= N; ++n) {
    auto& cur = L[n];
    for (std::uint64_t r : L[n - 1]) {
      if (member(decode_backward(r, n - 1))) {
        for (std::uint64_t a = 0; a < 2; ++a)
          if (member(decode_backward(2 * r + a, n))) cur.push_back(2 * r + a);
      } else {
        cur.push_back(2 * r);  // added elements continue with zeros
      }
    }
    if (adjust_ != Adjust::kExact) continue;
    const std::uint64_t target = (*f_)(n);
    if (cur.size() < target) {
      std::vector<std::uint64_t> extra;
      for (std::uint64_t r : L[n - 1])
        for (std::uint64_t a = 0; a < 2; ++a)
          if (!std::binary_search(cur.begin(), cur.end(), 2 * r + a)) extra.push_back(2 * r + a);
      extra.resize(std::min<std::size_t>(extra.size(), target - cur.size()));
      cur.insert(cur.end(), extra.begin(), extra.end());
      std::sort(cur.begin(), cur.end());
    } else if (cur.size() > target) {
      // drop the largest words whose sibling stays
      std::vector<bool> keep(cur.size(), true);
      std::size_t size = cur.size();
      for (std::size_t i = cur.size(); i-- > 0 && size > target;) {
        const bool sibling_kept = i > 0 && keep[i - 1] && (cur[i - 1] >> 1) == (cur[i] >> 1);
        if (sibling_kept) {
          keep[i] = false;
          --size;
        }
      }
      std::vector<std::uint64_t> kept;
      for (std::size_t i = 0; i < cur.size(); ++i)
        if (keep[i]) kept.push_back(cur[i]);
      cur = std::move(kept);
    }
  }
  return L;
}

void BuiltTree::visit(std::size_t n, const WordVisitor& visitor) const {
  const auto L = levels(n);
  Word w(n);
  for (std::uint64_t r : L[n]) {
    for (std::size_t t = 0; t < n; ++t) w[t] = static_cast<Symbol>((r >> t) & 1u);
    visitor(w);
  }
}

std::uint64_t BuiltTree::count(std::size_t n) const {
  if (adjust_ == Adjust::kNone) return closed_form(n);
  return levels(n)[n].size();
}

std::string tree_kind_name(BuiltTree::Kind k) { return k == BuiltTree::Kind::kTree1 ? "tree1" : "tree2"; }

std::vector<CrosscheckRow> growth_crosscheck(const BuiltTree& bt, std::size_t N) {
  check_enumeration_cap(N, kDefaultEnumerationCap);
  const auto L = bt.levels(N);
  std::vector<CrosscheckRow> rows;
  for (std::size_t n = 0; n <= N; ++n) {
    CrosscheckRow row;
    row.n = n;
    for (std::uint64_t r = 0; r < (std::uint64_t{1} << n); ++r) row.enumerated += bt.member(decode_backward(r, n));
    row.closed_form = bt.closed_form(n);
    row.adjusted = L[n].size();
    if (row.enumerated != row.closed_form)
      fail(ErrorCode::kConstructionMismatch, tree_kind_name(bt.kind()) + " at n=" + std::to_string(n) + ": enumerated " +
                                                 std::to_string(row.enumerated) + " vs closed form " +
                                                 std::to_string(row.closed_form));
    if (n > 0) {
      std::vector<std::uint64_t> proj;
      for (std::uint64_t r : L[n]) proj.push_back(r >> 1);
      proj.erase(std::unique(proj.begin(), proj.end()), proj.end());
      if (proj != L[n - 1])
        fail(ErrorCode::kConstructionMismatch,
             "level " + std::to_string(n) + " does not project onto level " + std::to_string(n - 1));
    }
    if (bt.adjust() == BuiltTree::Adjust::kExact && n > 0) {
      row.target = (*bt.rule())(n);
      if (row.adjusted != *row.target)
        fail(ErrorCode::kConstructionMismatch, "cannot reach d(" + std::to_string(n) + ") = " +
                                                   std::to_string(*row.target) + "; got " +
                                                   std::to_string(row.adjusted));
    } else if (row.adjusted != row.closed_form) {
      fail(ErrorCode::kConstructionMismatch, "level sizes disagree with the closed form at n=" + std::to_string(n));
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace gmeasure
