#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "gmeasure/models.hpp"

namespace gmeasure {

namespace {

// Appending finitely many symbols never changes the density class.
class BergerWalker : public Walker {
 public:
  BergerWalker(double p1, bool dense) : p1_(p1), dense_(dense) {}
  double prob(Symbol a) const override { return a == 1 ? p1_ : 1.0 - p1_; }
  void push(Symbol) override {}
  std::unique_ptr<Walker> clone() const override { return std::make_unique<BergerWalker>(*this); }
  std::optional<StateKey> key(std::size_t) const override { return StateKey{dense_ ? 1 : 0}; }

 private:
  double p1_;
  bool dense_;
};

double log_bernoulli(double p1, WordView w) {
  double v = 0.0;
  for (Symbol a : w) v += std::log(a == 1 ? p1 : 1.0 - p1);
  return v;
}

void visit_all(const Alphabet& alphabet, std::size_t n, const WordVisitor& visitor) {
  const std::uint64_t total = alphabet.word_count(n);
  require(total < (1ull << 40), "enumeration too large");
  for (std::uint64_t r = 0; r < total; ++r) visitor(alphabet.unrank(r, n));
}

}  // namespace

BergerModel::BergerModel(double prob_one_dense, double prob_one_sparse, double threshold)
    : GModel(Alphabet::binary()), dense_(prob_one_dense), sparse_(prob_one_sparse), threshold_(threshold) {
  require(dense_ > 0.0 && dense_ < 1.0 && sparse_ > 0.0 && sparse_ < 1.0,
          "berger probabilities must lie in (0,1)");
  require(threshold_ >= 0.0 && threshold_ <= 1.0, "berger threshold must lie in [0,1]");
}

nlohmann::json BergerModel::descriptor() const {
  return {{"family", family()},
          {"prob_one_dense", dense_},
          {"prob_one_sparse", sparse_},
          {"threshold", threshold_}};
}

double BergerModel::eval(const AnchoredPast& p, Symbol a) const {
  check_symbol(a);
  const double p1 = dense(p) ? dense_ : sparse_;
  return a == 1 ? p1 : 1.0 - p1;
}

double BergerModel::variation(const AnchoredPast&, std::size_t l) const {
  require(l >= 1, "variation order starts at 1");
  // both classes meet every cylinder
  return std::abs(dense_ - sparse_);
}

SupProduct BergerModel::sup_gn(WordView w) const {
  for (Symbol a : w) check_symbol(a);
  return {std::max(log_bernoulli(dense_, w), log_bernoulli(sparse_, w)), true};
}

double BergerModel::inf_g() const { return std::min({dense_, 1.0 - dense_, sparse_, 1.0 - sparse_}); }

void BergerModel::visit_contexts(std::size_t n, const WordVisitor& visitor) const {
  visit_all(alphabet(), n, visitor);
}

void BergerModel::visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const {
  if (dense_ != sparse_) visit_all(alphabet(), n, visitor);
}

std::unique_ptr<Walker> BergerModel::walker(const AnchoredPast& p) const {
  const bool d = dense(p);
  return std::make_unique<BergerWalker>(d ? dense_ : sparse_, d);
}

SupProduct BergerModel::log_pressure_sum(std::size_t n, std::size_t) const {
  if (dense_ == sparse_) return {kLogZero, true};
  // words with k ones share their sup; group by k
  std::vector<double> terms;
  for (std::size_t k = 0; k <= n; ++k) {
    const double lc = std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) - std::lgamma(double(n - k) + 1);
    const double a = double(k) * std::log(dense_) + double(n - k) * std::log1p(-dense_);
    const double b = double(k) * std::log(sparse_) + double(n - k) * std::log1p(-sparse_);
    terms.push_back(lc + std::max(a, b));
  }
  const double top = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - top);
  return {top + std::log(acc), true};
}

}  // namespace gmeasure
