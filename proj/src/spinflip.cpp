#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "gmeasure/models.hpp"

namespace gmeasure {

namespace {

constexpr Symbol kMinus = 0;
constexpr Symbol kPlus = 1;

// A -1 flips every later partial product, which swaps the two outer classes.
class SpinFlipWalker : public Walker {
 public:
  SpinFlipWalker(const SpinFlipFactor& m, int cls) : m_(&m), cls_(cls) {}
  double prob(Symbol a) const override {
    const double pp = m_->prob_plus(cls_);
    return a == kPlus ? pp : 1.0 - pp;
  }
  void push(Symbol a) override {
    if (a == kMinus) cls_ = -cls_;
  }
  std::unique_ptr<Walker> clone() const override { return std::make_unique<SpinFlipWalker>(*this); }
  std::optional<StateKey> key(std::size_t) const override { return StateKey{cls_}; }

 private:
  const SpinFlipFactor* m_;
  int cls_;
};

double log_sum_exp(const std::vector<double>& terms) {
  const double top = *std::max_element(terms.begin(), terms.end());
  if (top == kLogZero) return kLogZero;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return top + std::log(acc);
}

}  // namespace

SpinFlipFactor::SpinFlipFactor(double epsilon) : GModel(Alphabet::spin()), eps_(epsilon) {
  require(eps_ > 0.0 && eps_ < 1.0, "spin-flip epsilon must lie in (0,1)");
}

nlohmann::json SpinFlipFactor::descriptor() const { return {{"family", family()}, {"epsilon", eps_}}; }

int SpinFlipFactor::density_class(const AnchoredPast& p) const {
  const Word& period = p.period();
  const std::size_t s = p.suffix().size();
  bool sign = true;  // running partial product, true for +1
  for (std::size_t j = 1; j <= s; ++j) sign = sign == (p.back(j) == kPlus);
  std::size_t plus = 0;
  for (std::size_t t = 1; t <= period.size(); ++t) {
    sign = sign == (p.back(s + t) == kPlus);
    plus += sign;
  }
  // a period with product -1 makes the partial products alternate between two phases
  if (std::count(period.begin(), period.end(), kMinus) % 2 == 1) return 0;
  const std::size_t twice = 2 * plus;
  if (twice > period.size()) return 1;
  if (twice < period.size()) return -1;
  return 0;
}

double SpinFlipFactor::prob_plus(int cls) const {
  if (cls > 0) return 1.0 - eps_;
  if (cls < 0) return eps_;
  return 0.5;
}

double SpinFlipFactor::factor_cylinder(WordView y) const {
  require(!y.empty(), "factor_cylinder needs a nonempty word");
  for (Symbol a : y) check_symbol(a);
  const double n1 = static_cast<double>(y.size());
  double S = 0.0;
  bool sign = true;
  for (std::size_t k = y.size(); k-- > 0;) {
    sign = sign == (y[k] == kPlus);
    S += sign;
  }
  const double le = std::log(eps_), lf = std::log1p(-eps_);
  return std::exp((1.0 + S) * le + (n1 - S) * lf) + std::exp((n1 - S) * le + (1.0 + S) * lf);
}

double SpinFlipFactor::conditional_plus(WordView past_word) const {
  for (Symbol a : past_word) check_symbol(a);
  const double n = static_cast<double>(past_word.size());
  double S = 1.0;  // y_0 = +1 itself
  bool sign = true;
  for (std::size_t k = past_word.size(); k-- > 0;) {
    sign = sign == (past_word[k] == kPlus);
    S += sign;
  }
  const double m = n + 1.0 - 2.0 * S;
  const double lr = std::log(eps_) - std::log1p(-eps_);
  const double x = m * lr;  // log rho^m
  // (rho + rho^m) / (1 + rho^m), rearranged to keep exponents nonpositive
  const double ratio = x <= 0.0 ? (std::exp(lr) + std::exp(x)) / (1.0 + std::exp(x))
                                 : (std::exp(lr - x) + 1.0) / (std::exp(-x) + 1.0);
  return (1.0 - eps_) * ratio;
}

Word SpinFlipFactor::image(WordView x) {
  Word y;
  for (std::size_t t = 1; t < x.size(); ++t) y.push_back(x[t - 1] == x[t] ? kPlus : kMinus);
  return y;
}

double SpinFlipFactor::eval(const AnchoredPast& p, Symbol a) const {
  check_symbol(a);
  const double pp = prob_plus(density_class(p));
  return a == kPlus ? pp : 1.0 - pp;
}

double SpinFlipFactor::variation(const AnchoredPast&, std::size_t l) const {
  require(l >= 1, "variation order starts at 1");
  return std::abs(1.0 - 2.0 * eps_);
}

SupProduct SpinFlipFactor::sup_gn(WordView w) const {
  for (Symbol a : w) check_symbol(a);
  double best = kLogZero;
  for (int cls : {-1, 0, 1}) {
    SpinFlipWalker wk(*this, cls);
    double v = 0.0;
    for (Symbol a : w) {
      v += std::log(wk.prob(a));
      wk.push(a);
    }
    best = std::max(best, v);
  }
  return {best, true};
}

double SpinFlipFactor::inf_g() const { return std::min(eps_, 1.0 - eps_); }

void SpinFlipFactor::visit_contexts(std::size_t n, const WordVisitor& visitor) const {
  const std::uint64_t total = alphabet().word_count(n);
  require(total < (1ull << 40), "enumeration too large");
  for (std::uint64_t r = 0; r < total; ++r) visitor(alphabet().unrank(r, n));
}

void SpinFlipFactor::visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const {
  if (eps_ != 0.5) visit_contexts(n, visitor);
}

std::unique_ptr<Walker> SpinFlipFactor::walker(const AnchoredPast& p) const {
  return std::make_unique<SpinFlipWalker>(*this, density_class(p));
}

SupProduct SpinFlipFactor::log_pressure_sum(std::size_t n, std::size_t) const {
  if (eps_ == 0.5) return {kLogZero, true};
  // words biject with their partial-product sequences; p counts the +1 products
  const double le = std::log(eps_), lf = std::log1p(-eps_);
  std::vector<double> terms;
  for (std::size_t p = 0; p <= n; ++p) {
    const double dp = double(p), dq = double(n - p);
    const double lc = std::lgamma(double(n) + 1) - std::lgamma(dp + 1) - std::lgamma(dq + 1);
    const double up = dp * lf + dq * le;
    const double down = dp * le + dq * lf;
    const double half = -double(n) * std::log(2.0);
    terms.push_back(lc + std::max({up, down, half}));
  }
  return {log_sum_exp(terms), true};
}

}  // namespace gmeasure
