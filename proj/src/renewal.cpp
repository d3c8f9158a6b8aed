#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "gmeasure/models.hpp"

namespace gmeasure {

namespace {

class RenewalWalker : public Walker {
 public:
  RenewalWalker(const RenewalModel& m, std::optional<std::size_t> ell) : m_(&m), ell_(ell) {}
  double prob(Symbol a) const override {
    const double p1 = m_->prob_one(ell_);
    return a == 1 ? p1 : 1.0 - p1;
  }
  void push(Symbol a) override {
    if (a == 1)
      ell_ = 1;
    else if (ell_)
      ++*ell_;
  }
  std::unique_ptr<Walker> clone() const override { return std::make_unique<RenewalWalker>(*this); }
  std::optional<StateKey> key(std::size_t) const override {
    return StateKey{ell_ ? static_cast<std::int64_t>(*ell_) : -1};
  }

 private:
  const RenewalModel* m_;
  std::optional<std::size_t> ell_;
};

}  // namespace

RenewalModel::RenewalModel(QRule q, double q_inf)
    : GModel(Alphabet::binary()), q_(std::move(q)), q_inf_(q_inf) {
  require(q_inf_ >= 0.0 && q_inf_ <= 1.0, "q_inf must lie in [0,1]");
}

bool RenewalModel::strictly_interior() const { return q_.strictly_interior() && q_inf_ > 0.0 && q_inf_ < 1.0; }

bool RenewalModel::discontinuous_at_zero() const {
  const auto lim = q_.limit();
  return !lim || *lim != q_inf_;
}

nlohmann::json RenewalModel::descriptor() const {
  return {{"family", family()}, {"q", q_.to_json()}, {"q_inf", q_inf_}};
}

double RenewalModel::eval(const AnchoredPast& p, Symbol a) const {
  check_symbol(a);
  const double p1 = prob_one(p.distance_to(1));
  return a == 1 ? p1 : 1.0 - p1;
}

ContextLength RenewalModel::context_length(const AnchoredPast& p) const { return p.distance_to(1); }

double RenewalModel::variation(const AnchoredPast& p, std::size_t l) const {
  require(l >= 1, "variation order starts at 1");
  const auto ell = p.distance_to(1);
  if (ell && l >= *ell) return 0.0;
  // pasts ending in 0^l have l1 ranging over l+1, l+2, ..., and infinity
  const double hi = std::max(q_.sup_from(l + 1), q_inf_);
  const double lo = std::min(q_.inf_from(l + 1), q_inf_);
  return hi - lo;
}

SupProduct RenewalModel::sup_gn(WordView w) const {
  for (Symbol a : w) check_symbol(a);
  const auto first_one = std::find(w.begin(), w.end(), Symbol{1});
  const std::size_t f = static_cast<std::size_t>(first_one - w.begin());
  const bool has_one = first_one != w.end();

  // what follows the first 1 no longer depends on the past
  double rest = 0.0;
  if (has_one) {
    std::size_t ell = 1;
    for (std::size_t t = f + 1; t < w.size(); ++t) {
      const double p1 = q_(ell);
      rest += std::log(w[t] == 1 ? p1 : 1.0 - p1);
      ell = w[t] == 1 ? 1 : ell + 1;
    }
  }

  auto head = [&](std::size_t ell0) {
    double v = q_.log_survival(ell0, ell0 + f - 1);
    if (has_one) v += std::log(q_(ell0 + f));
    return v;
  };
  double best = static_cast<double>(f) * std::log1p(-q_inf_) + (has_one ? std::log(q_inf_) : 0.0);
  if (f == 0 && !has_one) best = 0.0;

  const auto shape = q_.shape();
  if (shape.periodic) {
    for (std::size_t ell0 = 1; ell0 < shape.start + shape.period; ++ell0) best = std::max(best, head(ell0));
    return {best + rest, true};
  }

  const double lim = shape.limit;
  if (!has_one) {
    // the factors 1 - q_{l0+t} only grow with l0 once q is monotone
    for (std::size_t ell0 = 1; ell0 <= shape.start; ++ell0) best = std::max(best, head(ell0));
    best = std::max(best, static_cast<double>(f) * std::log1p(-lim));
    return {best + rest, true};
  }
  const double lim_part = static_cast<double>(f) * std::log1p(-lim);
  std::size_t scanned = 0;
  for (std::size_t K = std::max<std::size_t>(64, shape.start); K <= (1u << 22); K *= 2) {
    for (std::size_t ell0 = scanned + 1; ell0 <= K; ++ell0) best = std::max(best, head(ell0));
    scanned = K;
    // for l0 > K every factor is at most its limit bound
    const double bound = lim_part + std::log(q_(K + 1 + f));
    if (best >= bound) return {best + rest, true};
    if (K == (1u << 22)) return {std::max(best, bound) + rest, false};
  }
  return {best + rest, false};
}

double RenewalModel::inf_g() const {
  return std::min({q_.inf_from(1), 1.0 - q_.sup_from(1), q_inf_, 1.0 - q_inf_});
}

void RenewalModel::visit_contexts(std::size_t n, const WordVisitor& visitor) const {
  const Word zeros(n, 0);
  visitor(zeros);
}

void RenewalModel::visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const {
  if (discontinuous_at_zero()) visit_contexts(n, visitor);
}

bool RenewalModel::is_context_suffix(WordView word) const {
  return std::all_of(word.begin(), word.end(), [](Symbol s) { return s == 0; });
}

std::unique_ptr<Walker> RenewalModel::walker(const AnchoredPast& p) const {
  return std::make_unique<RenewalWalker>(*this, p.distance_to(1));
}

double RenewalModel::zero_run_rate(const QRule& q, double q_inf) {
  double rate = std::log1p(-q_inf);
  const auto shape = q.shape();
  if (shape.periodic) {
    double s = 0.0;
    for (std::size_t i = shape.start; i < shape.start + shape.period; ++i) s += std::log1p(-q(i));
    rate = std::max(rate, s / static_cast<double>(shape.period));
  } else {
    rate = std::max(rate, std::log1p(-shape.limit));
  }
  return rate;
}

std::optional<SupProduct> RenewalModel::pressure_limit() const {
  if (!discontinuous_at_zero()) return SupProduct{kLogZero, true};
  return SupProduct{zero_run_rate(q_, q_inf_), true};
}

std::optional<std::vector<AnchoredPast>> RenewalModel::discontinuity_points() const {
  std::vector<AnchoredPast> pts;
  if (discontinuous_at_zero()) pts.emplace_back(Word{0});
  return pts;
}

}  // namespace gmeasure
