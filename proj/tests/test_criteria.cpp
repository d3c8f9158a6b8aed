#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "gmeasure/criteria.hpp"
#include "gmeasure/models.hpp"

using namespace gmeasure;

namespace {

TabulatedTree order2_chain() {
  std::map<Word, std::vector<double>> ctx{{{0, 0}, {0.7, 0.3}}, {{1, 0}, {0.4, 0.6}}, {{0, 1}, {0.5, 0.5}},
                                          {{1, 1}, {0.2, 0.8}}};
  return TabulatedTree(Alphabet::binary(), ctx);
}

}  // namespace

TEST(VOfQ, GeometricClosedForms) {
  const VResult half = v_of_q(QRule::constant(0.5));
  EXPECT_EQ(half.status, VResult::Status::kFinite);
  EXPECT_NEAR(half.value, 1.0, 1e-12);
  const VResult v3 = v_of_q(QRule::constant(0.3));
  EXPECT_NEAR(v3.value, 7.0 / 3.0, 1e-12);
  // alternating rule: blocks of (1-a)(1-b)
  const VResult alt = v_of_q(QRule::alternating(0.5, 0.25));
  const double block = 0.5 + 0.5 * 0.75, rho = 0.5 * 0.75;
  EXPECT_NEAR(alt.value, block / (1.0 - rho), 1e-12);
}

TEST(VOfQ, HarmonicDiverges) {
  const VResult v = v_of_q(QRule::harmonic());
  EXPECT_EQ(v.status, VResult::Status::kDiverges);
  EXPECT_FALSE(v.certificate.empty());
  EXPECT_EQ(v_of_q(QRule::power(1.0)).status, VResult::Status::kDiverges);
  EXPECT_EQ(v_of_q(QRule::power(0.7)).status, VResult::Status::kDiverges);
}

TEST(VOfQ, PowerTwoIsZetaTwoMinusOne) {
  const VResult v = v_of_q(QRule::power(2.0));
  ASSERT_EQ(v.status, VResult::Status::kFinite);
  const double oracle = std::numbers::pi * std::numbers::pi / 6.0 - 1.0;
  EXPECT_NEAR(v.value, oracle, 1e-6);
  EXPECT_LE(v.lower, oracle + 1e-12);
  EXPECT_GE(v.upper, oracle - 1e-12);
}

TEST(VOfQ, PartialSumsMonotoneAndBelowValue) {
  for (const QRule& q : {QRule::power(2.5), QRule::constant(0.2), QRule::table({0.9, 0.1, 0.0}, QRule::power(3.0))}) {
    const VResult v = v_of_q(q);
    ASSERT_EQ(v.status, VResult::Status::kFinite);
    for (std::size_t k = 1; k < v.partial_sums.size(); ++k) ASSERT_GE(v.partial_sums[k], v.partial_sums[k - 1]);
    ASSERT_LE(v.partial_sums.back(), v.upper + 1e-12);
  }
}

TEST(MOfQ, Examples) {
  EXPECT_NEAR(*m_of_q(QRule::constant(0.5)).value, 2.0, 1e-12);
  EXPECT_NEAR(1.0 / *m_of_q(QRule::constant(0.4)).value, 0.4, 1e-12);
  EXPECT_FALSE(m_of_q(QRule::harmonic()).value.has_value());
}

TEST(Growth, CountsAndOrdering) {
  const RenewalModel case3(QRule::harmonic(), 0.5);
  const GrowthSeries g = growth_series(case3, 30);
  for (auto d : g.discontinuities) EXPECT_EQ(d, 1u);
  const TrunkTreeModel trunk(0.2);
  const GrowthSeries t = growth_series(trunk, 64);
  for (std::size_t n = 1; n <= 64; ++n) {
    EXPECT_LE(t.contexts[n - 1], n);
    EXPECT_LE(t.discontinuities[n - 1], t.contexts[n - 1]);
  }
}

TEST(Pressure, ConstantRenewalIsLogHalf) {
  // q_inf differs from q so that 0^n is a discontinuity prefix
  const RenewalModel m(QRule::constant(0.5), 0.75);
  const PressureSeries ps = pressure_series(m, 32);
  for (double p : ps.p) EXPECT_NEAR(p, std::log(0.5), 1e-15);
  EXPECT_EQ(ps.verdict, Verdict::kHolds);
}

TEST(Pressure, BoundedByCountAndLowerBoundedQ) {
  const RenewalModel m(QRule::table({0.3, 0.6}, QRule::alternating(0.2, 0.4)), 0.9);
  const PressureSeries ps = pressure_series(m, 20);
  for (std::size_t n = 1; n <= 20; ++n) {
    EXPECT_LE(ps.p[n - 1], ps.count_bound[n - 1] + 1e-15);
    EXPECT_LE(ps.p[n - 1], std::log(1.0 - 0.2) + 1e-12);
  }
}

TEST(Pressure, BergerIsZeroAndNeverHolds) {
  const BergerModel m;
  const PressureSeries ps = pressure_series(m, 16);
  // sup over the two density classes: p_n = (1/n) log sum_k C(n,k) max(.3^k .7^(n-k), .7^k .3^(n-k))
  for (std::size_t n = 1; n <= 16; ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k <= n; ++k) {
      const double c = std::tgamma(n + 1.0) / (std::tgamma(k + 1.0) * std::tgamma(n - k + 1.0));
      s += c * std::max(std::pow(0.3, k) * std::pow(0.7, n - k), std::pow(0.7, k) * std::pow(0.3, n - k));
    }
    EXPECT_NEAR(ps.p[n - 1], std::log(s) / static_cast<double>(n), 1e-12);
    EXPECT_GE(ps.p[n - 1], 0.0);
  }
  ASSERT_TRUE(ps.limit.has_value());
  EXPECT_EQ(ps.limit->log_value, 0.0);
  EXPECT_EQ(ps.verdict, Verdict::kFails);
}

TEST(VFree, Examples) {
  const RenewalModel case3(QRule::harmonic(), 0.5);
  const VFreeResult r = v_free_check(case3, Word{1}, 12);
  EXPECT_EQ(r.verdict, Verdict::kHolds);
  EXPECT_FALSE(r.certificate.empty());

  const BergerModel berger;
  const VFreeResult b = v_free_check(berger, Word{1, 0}, 8);
  EXPECT_EQ(b.verdict, Verdict::kFails);
  ASSERT_TRUE(b.witness.has_value());

  const FullShiftFamily odd(3, {0, 2});
  EXPECT_EQ(v_free_check(odd, Word{1}, 10).verdict, Verdict::kHolds);
  EXPECT_EQ(v_free_check(odd, Word{2, 0}, 10).verdict, Verdict::kFails);
}

TEST(ExplicitUniqueness, Examples) {
  for (double eps : {0.05, 0.2, 0.4}) EXPECT_EQ(corollary5_check(TrunkTreeModel(eps), 64).verdict, Verdict::kHolds);
  EXPECT_EQ(corollary5_check(BergerModel(), 16).verdict, Verdict::kFails);
  EXPECT_EQ(corollary5_check(order2_chain(), 16).verdict, Verdict::kHolds);
  try {
    corollary5_check(RenewalModel(QRule::harmonic(), 0.5), 16);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kNotApplicable);
  }
}

TEST(ExplicitUniqueness, MonotoneInEpsilon) {
  // threshold 1/(1-eps) grows with eps; a full-shift growth of 2 passes once eps > 1/2
  EXPECT_EQ(corollary5_check(SpinFlipFactor(0.3), 10).verdict, Verdict::kFails);
  bool held = false;
  for (double eps : {0.05, 0.1, 0.2, 0.3, 0.45}) {
    const bool h = corollary5_check(TrunkTreeModel(eps), 32).verdict == Verdict::kHolds;
    EXPECT_TRUE(!held || h);
    held = held || h;
  }
  EXPECT_TRUE(held);
}

TEST(Summability, GridMatchesSignTest) {
  for (double a : {1.5, 2.0, 2.5, 3.0})
    for (double d : {0.25, 0.5, 1.0, 1.5, 2.0}) {
      const bool expected = d + 1.0 < a;
      EXPECT_EQ(summability_classifier(a, d, 1u << 10).summable, expected);
      EXPECT_EQ(summability_classifier(a, d, 1u << 14).summable, expected);
    }
  EXPECT_FALSE(summability_classifier(2.0, 1.0).summable);
}

TEST(Summability, TrendSeparatesRegimes) {
  const SummabilityResult yes = summability_classifier(3.0, 0.5, 1u << 14);
  const SummabilityResult no = summability_classifier(1.5, 2.0, 1u << 14);
  for (std::size_t i = 1; i < yes.partial.size(); ++i) EXPECT_GE(yes.partial[i], yes.partial[i - 1]);
  EXPECT_LT(yes.trend, no.trend);
}

TEST(SrSandwich, RenewalRatesAreQ) {
  const RenewalModel m(QRule::constant(0.3), 0.3);
  const SandwichRates sr = sr_sandwich(m, 10);
  for (std::size_t i = 0; i < 10; ++i) {
    EXPECT_DOUBLE_EQ(sr.s[i], 0.3);
    EXPECT_DOUBLE_EQ(sr.r[i], 0.3);
  }
  EXPECT_EQ(sr.existence, Verdict::kHolds);
  EXPECT_NEAR(sr.v_s.value, 7.0 / 3.0, 1e-12);

  const SandwichRates h = sr_sandwich(RenewalModel(QRule::harmonic(), 0.5), 10);
  EXPECT_EQ(h.v_s.status, VResult::Status::kDiverges);
  EXPECT_EQ(h.v_r.status, VResult::Status::kDiverges);
  EXPECT_EQ(h.nonexistence, Verdict::kHolds);

  EXPECT_THROW(sr_sandwich(BergerModel(), 5), Error);
}

TEST(SrSandwich, GeneralizedRenewalOrdersRates) {
  const GeneralizedRenewalModel m(QRule::power(3.0), 0.5, 0.5, 1, 0.5);
  const SandwichRates sr = sr_sandwich(m, 20);
  for (std::size_t i = 0; i < 20; ++i) {
    EXPECT_LE(sr.s[i], sr.r[i]);
    EXPECT_NEAR(sr.r[i], sr.s[i] + 0.5 * (1.0 - sr.s[i]), 1e-15);
  }
  EXPECT_EQ(sr.existence, Verdict::kHolds);
}
