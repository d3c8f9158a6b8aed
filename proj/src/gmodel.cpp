#include "gmeasure/gmodel.hpp"

#include <algorithm>
#include <cmath>

namespace gmeasure {

std::uint64_t PrefixFamily::count(std::size_t n) const {
  std::uint64_t c = 0;
  visit(n, [&](WordView) { ++c; });
  return c;
}

void check_enumeration_cap(std::size_t n, std::size_t cap) {
  if (n > cap)
    fail(ErrorCode::kResourceCap,
         "enumeration at length " + std::to_string(n) + " exceeds the cap " + std::to_string(cap));
}

void check_count_cap(std::uint64_t count, std::size_t cap) {
  if (cap < 64 && count > (std::uint64_t{1} << cap))
    fail(ErrorCode::kResourceCap,
         "enumeration of " + std::to_string(count) + " words exceeds the cap 2^" + std::to_string(cap));
}

void GModel::check_symbol(Symbol a) const {
  require(alphabet_.contains(a), "symbol outside alphabet");
}

double GModel::variation(const AnchoredPast&, std::size_t) const {
  fail(ErrorCode::kCapability, family() + " does not expose variation");
}

SupProduct GModel::sup_gn(WordView) const {
  fail(ErrorCode::kCapability, family() + " does not expose sup_gn");
}

std::uint64_t GModel::count_contexts(std::size_t n) const {
  std::uint64_t c = 0;
  visit_contexts(n, [&](WordView) { ++c; });
  return c;
}

std::uint64_t GModel::count_discontinuity_prefixes(std::size_t n) const {
  std::uint64_t c = 0;
  visit_discontinuity_prefixes(n, [&](WordView) { ++c; });
  return c;
}

bool GModel::is_context_suffix(WordView word) const {
  bool found = false;
  visit_contexts(word.size(), [&](WordView u) {
    if (!found && std::equal(u.begin(), u.end(), word.begin(), word.end())) found = true;
  });
  return found;
}

std::unique_ptr<Walker> GModel::walker(const AnchoredPast& p) const {
  return std::make_unique<PastWalker>(*this, p);
}

SupProduct GModel::log_pressure_sum(std::size_t n, std::size_t cap) const {
  check_count_cap(count_discontinuity_prefixes(n), cap);
  std::vector<double> logs;
  bool exact = true;
  visit_discontinuity_prefixes(n, [&](WordView w) {
    const SupProduct s = sup_gn(w);
    exact = exact && s.exact;
    logs.push_back(s.log_value);
  });
  if (logs.empty()) return {kLogZero, exact};
  const double top = *std::max_element(logs.begin(), logs.end());
  if (top == kLogZero) return {kLogZero, exact};
  double acc = 0.0;
  for (double l : logs) acc += std::exp(l - top);
  return {top + std::log(acc), exact};
}

std::vector<double> GModel::distribution(const AnchoredPast& p) const {
  std::vector<double> d(alphabet_.size());
  for (std::size_t a = 0; a < d.size(); ++a) d[a] = eval(p, static_cast<Symbol>(a));
  return d;
}

LogWeight GModel::g_n_log(const AnchoredPast& p, WordView w) const {
  auto wk = walker(p);
  LogWeight acc = 0.0;
  for (Symbol a : w) {
    check_symbol(a);
    const double pr = wk->prob(a);
    if (pr <= 0.0) return kLogZero;
    acc += std::log(pr);
    wk->push(a);
  }
  return acc;
}

std::vector<Word> GModel::enumerate_contexts(std::size_t n, std::size_t cap) const {
  check_count_cap(count_contexts(n), cap);
  std::vector<Word> out;
  visit_contexts(n, [&](WordView w) { out.emplace_back(w.begin(), w.end()); });
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<Word> GModel::enumerate_discontinuity_prefixes(std::size_t n, std::size_t cap) const {
  check_count_cap(count_discontinuity_prefixes(n), cap);
  std::vector<Word> out;
  visit_discontinuity_prefixes(n, [&](WordView w) { out.emplace_back(w.begin(), w.end()); });
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

bool contains_factor(const Word& hay, WordView v) {
  return std::search(hay.begin(), hay.end(), v.begin(), v.end()) != hay.end();
}

}  // namespace

std::string DiscontinuityFamily::v_free_certificate(WordView v) const {
  const auto points = m_.discontinuity_points();
  if (!points) return {};
  for (const auto& p : *points) {
    // every factor of ...PPs of length |v| already shows up in P^r s
    Word unrolled;
    const std::size_t reps = v.size() / p.period().size() + 2;
    for (std::size_t r = 0; r < reps; ++r) unrolled.insert(unrolled.end(), p.period().begin(), p.period().end());
    unrolled.insert(unrolled.end(), p.suffix().begin(), p.suffix().end());
    if (contains_factor(unrolled, v)) return {};
  }
  if (points->empty()) return "D_g is empty";
  std::string listing;
  for (const auto& p : *points) {
    if (!listing.empty()) listing += ", ";
    listing += p.to_string(m_.alphabet());
  }
  return "D_g = {" + listing + "}, and no element contains " + m_.alphabet().format(v);
}

FullShiftFamily::FullShiftFamily(std::size_t alphabet_size, std::vector<Symbol> allowed)
    : size_(alphabet_size), allowed_(std::move(allowed)) {
  require(!allowed_.empty(), "full shift needs at least one symbol");
  std::sort(allowed_.begin(), allowed_.end());
  for (Symbol s : allowed_) require(s < size_, "sub-alphabet symbol out of range");
}

void FullShiftFamily::visit(std::size_t n, const WordVisitor& v) const {
  Word w(n, allowed_.front());
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    v(w);
    std::size_t t = n;
    while (t > 0) {
      --t;
      if (++idx[t] < allowed_.size()) {
        w[t] = allowed_[idx[t]];
        break;
      }
      idx[t] = 0;
      w[t] = allowed_.front();
      if (t == 0) return;
    }
    if (n == 0) return;
  }
}

std::uint64_t FullShiftFamily::count(std::size_t n) const {
  std::uint64_t c = 1;
  for (std::size_t i = 0; i < n; ++i) c *= allowed_.size();
  return c;
}

std::string FullShiftFamily::v_free_certificate(WordView v) const {
  for (Symbol s : v)
    if (!std::binary_search(allowed_.begin(), allowed_.end(), s))
      return "every element uses only the sub-alphabet, and v contains symbol " + std::to_string(int(s));
  return {};
}

}  // namespace gmeasure
