#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "gmeasure/models.hpp"

namespace gmeasure {

namespace {

class GeneralizedRenewalWalker : public Walker {
 public:
  GeneralizedRenewalWalker(const GeneralizedRenewalModel& m, AnchoredPast past)
      : m_(&m), past_(std::move(past)), ell_(past_.distance_to(1)) {}

  double prob(Symbol a) const override {
    double p1 = m_->s_inf();
    if (ell_) {
      const std::size_t hw = m_->h(*ell_);
      std::size_t ones = 0;
      for (std::size_t k = 1; k <= hw; ++k) ones += past_.back(*ell_ + k) == 1;
      p1 = m_->prob_one_given(*ell_, ones);
    }
    return a == 1 ? p1 : 1.0 - p1;
  }
  void push(Symbol a) override {
    past_.push_back(a);
    if (a == 1)
      ell_ = 1;
    else if (ell_)
      ++*ell_;
  }
  std::unique_ptr<Walker> clone() const override { return std::make_unique<GeneralizedRenewalWalker>(*this); }

 private:
  const GeneralizedRenewalModel* m_;
  AnchoredPast past_;
  std::optional<std::size_t> ell_;
};

}  // namespace

GeneralizedRenewalModel::GeneralizedRenewalModel(QRule s, double s_inf, double spread, std::uint64_t c1,
                                                 double delta)
    : GModel(Alphabet::binary()), s_(std::move(s)), s_inf_(s_inf), spread_(spread), c1_(c1), delta_(delta) {
  require(s_inf_ > 0.0 && s_inf_ < 1.0, "s_inf must lie in (0,1)");
  require(spread_ > 0.0 && spread_ < 1.0, "spread must lie in (0,1)");
  require(c1_ >= 1, "c1 must be a positive integer");
  require(delta_ > 0.0 && std::isfinite(delta_), "delta must be positive");
  require(s_.sup_from(1) < 1.0 && s_.strictly_interior(), "s must take values in (0,1)");
}

std::size_t GeneralizedRenewalModel::h(std::size_t j) const {
  if (j == 0) return 0;
  const double v = static_cast<double>(c1_) * std::pow(static_cast<double>(j), delta_);
  require(v < 1e15, "window h(j) too large to represent");
  // pow can land one ulp under an exact integer
  return static_cast<std::size_t>(std::floor(v * (1.0 + 1e-14)));
}

std::size_t GeneralizedRenewalModel::H_inverse(std::size_t i) const {
  std::size_t lo = 0, hi = i;  // H(j) >= j, so the answer is at most i
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo + 1) / 2;
    if (H(mid) <= i)
      lo = mid;
    else
      hi = mid - 1;
  }
  return lo;
}

bool GeneralizedRenewalModel::discontinuous_at_zero() const {
  const auto sl = s_.limit();
  const auto rl = r_rule().limit();
  return !sl || !rl || *sl != s_inf_ || *rl != s_inf_;
}

double GeneralizedRenewalModel::prob_one_given(std::size_t j, std::size_t ones) const {
  const std::size_t hw = h(j);
  const double sj = s_(j);
  if (hw == 0) return sj;
  return sj + (r(j) - sj) * static_cast<double>(ones) / static_cast<double>(hw);
}

nlohmann::json GeneralizedRenewalModel::descriptor() const {
  return {{"family", family()},
          {"s", s_.to_json()},
          {"s_inf", s_inf_},
          {"spread", spread_},
          {"h", {{"c1", c1_}, {"delta", delta_}}}};
}

double GeneralizedRenewalModel::eval(const AnchoredPast& p, Symbol a) const {
  check_symbol(a);
  return GeneralizedRenewalWalker(*this, p).prob(a);
}

ContextLength GeneralizedRenewalModel::context_length(const AnchoredPast& p) const {
  const auto j = p.distance_to(1);
  if (!j) return std::nullopt;
  return H(*j);
}

double GeneralizedRenewalModel::variation(const AnchoredPast& p, std::size_t l) const {
  require(l >= 1, "variation order starts at 1");
  const auto j = p.distance_to(1);
  if (!j || l < *j) {
    const double hi = std::max(r_rule().sup_from(l + 1), s_inf_);
    const double lo = std::min(s_.inf_from(l + 1), s_inf_);
    return hi - lo;
  }
  const std::size_t full = H(*j);
  if (l >= full) return 0.0;
  const double free = static_cast<double>(full - l);
  return (r(*j) - s_(*j)) * free / static_cast<double>(h(*j));
}

SupProduct GeneralizedRenewalModel::sup_gn(WordView w) const {
  for (Symbol a : w) check_symbol(a);
  const auto first_one = std::find(w.begin(), w.end(), Symbol{1});
  const std::size_t f = static_cast<std::size_t>(first_one - w.begin());
  // an all-zero window before the last 1 maximizes every zero factor, so runs of zeros reduce to renewal(s)
  const RenewalModel lower(s_, s_inf_);
  const SupProduct zeros = lower.sup_gn(Word(f, 0));
  if (first_one == w.end()) return zeros;

  double bound = zeros.log_value + std::log(std::max(r_rule().sup_from(f + 1), s_inf_));
  // after the first 1 each factor is maximized separately over the symbols before time 0
  std::size_t last_one = f;
  for (std::size_t t = f + 1; t < w.size(); ++t) {
    const std::size_t ell = t - last_one;
    const std::size_t hw = h(ell);
    std::size_t known_ones = 0, unknown = 0;
    for (std::size_t k = 1; k <= hw; ++k) {
      if (last_one >= k)
        known_ones += w[last_one - k] == 1;
      else
        ++unknown;
    }
    const double p_lo = prob_one_given(ell, known_ones);
    const double p_hi = prob_one_given(ell, known_ones + unknown);
    bound += std::log(w[t] == 1 ? p_hi : 1.0 - p_lo);
    if (w[t] == 1) last_one = t;
  }
  return {bound, false};
}

double GeneralizedRenewalModel::inf_g() const {
  return std::min({s_.inf_from(1), 1.0 - r_rule().sup_from(1), s_inf_, 1.0 - s_inf_});
}

void GeneralizedRenewalModel::visit_contexts(std::size_t n, const WordVisitor& visitor) const {
  // the last H^{-1}(n) symbols must be zero, the others are free
  const std::size_t zeros = H_inverse(n);
  const std::size_t free = n - zeros;
  require(free < 63, "context enumeration too large");
  Word w(n, 0);
  for (std::uint64_t r = 0; r < (1ull << free); ++r) {
    for (std::size_t t = 0; t < free; ++t) w[t] = static_cast<Symbol>((r >> (free - 1 - t)) & 1u);
    visitor(w);
  }
}

std::uint64_t GeneralizedRenewalModel::count_contexts(std::size_t n) const {
  const std::size_t free = n - H_inverse(n);
  return free >= 64 ? std::numeric_limits<std::uint64_t>::max() : (1ull << free);
}

void GeneralizedRenewalModel::visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const {
  if (discontinuous_at_zero()) visitor(Word(n, 0));
}

bool GeneralizedRenewalModel::is_context_suffix(WordView word) const {
  const std::size_t zeros = H_inverse(word.size());
  for (std::size_t j = 1; j <= zeros; ++j)
    if (word[word.size() - j] == 1) return false;
  return true;
}

std::unique_ptr<Walker> GeneralizedRenewalModel::walker(const AnchoredPast& p) const {
  return std::make_unique<GeneralizedRenewalWalker>(*this, p);
}

std::optional<double> GeneralizedRenewalModel::growth_certificate() const {
  const double c = static_cast<double>(c1_);
  if (delta_ < 1.0) return 1.0;
  if (delta_ == 1.0) return std::pow(2.0, c / (1.0 + c));
  return 2.0;
}

std::optional<SupProduct> GeneralizedRenewalModel::pressure_limit() const {
  if (!discontinuous_at_zero()) return SupProduct{kLogZero, true};
  return SupProduct{RenewalModel::zero_run_rate(s_, s_inf_), true};
}

std::optional<std::vector<AnchoredPast>> GeneralizedRenewalModel::discontinuity_points() const {
  std::vector<AnchoredPast> pts;
  if (discontinuous_at_zero()) pts.emplace_back(Word{0});
  return pts;
}

}  // namespace gmeasure
