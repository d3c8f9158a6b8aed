#include <random>

#include <gtest/gtest.h>

#include "gmeasure/core.hpp"
#include "gmeasure/qrule.hpp"
#include "gmeasure/rng.hpp"

#include <nlohmann/json.hpp>

using namespace gmeasure;

namespace {

Word random_word(std::mt19937_64& rng, std::size_t min_len, std::size_t max_len) {
  std::uniform_int_distribution<std::size_t> len(min_len, max_len);
  std::bernoulli_distribution bit(0.5);
  Word w(len(rng));
  for (auto& s : w) s = bit(rng) ? 1 : 0;
  return w;
}

// Naive reading of ...period period suffix at position -j.
Symbol naive_back(const Word& period, const Word& suffix, std::size_t j) {
  if (j <= suffix.size()) return suffix[suffix.size() - j];
  const std::size_t t = j - suffix.size() - 1;
  return period[period.size() - 1 - (t % period.size())];
}

}  // namespace

TEST(Alphabet, ParseFormatRoundTrip) {
  const Alphabet a = Alphabet::binary();
  EXPECT_EQ(a.format(a.parse("0110")), "0110");
  EXPECT_THROW(a.parse("012"), Error);
  const Alphabet s = Alphabet::spin();
  EXPECT_EQ(s.symbol('-'), 0);
  EXPECT_EQ(s.symbol('+'), 1);
}

TEST(Alphabet, RankUnrank) {
  const Alphabet a("abc");
  for (std::uint64_t r = 0; r < a.word_count(4); ++r) EXPECT_EQ(a.rank(a.unrank(r, 4)), r);
  EXPECT_EQ(a.rank(a.parse("aab")), 1u);
  EXPECT_EQ(Alphabet::binary().word_count(70), UINT64_MAX);
}

TEST(AnchoredPast, AppendExamples) {
  const Alphabet a = Alphabet::binary();
  const AnchoredPast p = AnchoredPast::parse(a, "(0)");
  EXPECT_EQ(p.appended(a.parse("1")), AnchoredPast::parse(a, "(0)1"));
  EXPECT_EQ(p.appended(Word{}), p);
  const AnchoredPast q = AnchoredPast::parse(a, "(01)1");
  EXPECT_EQ(q.appended(a.parse("1")).appended(a.parse("0")), q.appended(a.parse("10")));
}

TEST(AnchoredPast, Canonicalization) {
  const Alphabet a = Alphabet::binary();
  EXPECT_EQ(AnchoredPast::parse(a, "(0101)01"), AnchoredPast::parse(a, "(01)"));
  EXPECT_EQ(AnchoredPast::parse(a, "(10)1"), AnchoredPast::parse(a, "(01)"));
  EXPECT_EQ(AnchoredPast::parse(a, "(0)0001"), AnchoredPast::parse(a, "(0)1"));
}

TEST(AnchoredPast, RandomizedCanonicalAndCoherent) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const Word period = random_word(rng, 1, 4);
    const Word suffix = random_word(rng, 0, 6);
    const Word w = random_word(rng, 0, 5);
    const AnchoredPast p(period, suffix);
    const std::size_t horizon = 2 * (period.size() * 4 + suffix.size() + w.size() + 4);
    for (std::size_t j = 1; j <= horizon; ++j) ASSERT_EQ(p.back(j), naive_back(period, suffix, j));

    // append: new last |w| symbols are w, older ones shift back
    const AnchoredPast q = p.appended(w);
    for (std::size_t j = 1; j <= w.size(); ++j) ASSERT_EQ(q.back(j), w[w.size() - j]);
    for (std::size_t j = 1; j <= horizon; ++j) ASSERT_EQ(q.back(j + w.size()), p.back(j));

    // same sequence written differently canonicalizes to the same form
    Word doubled = period;
    doubled.insert(doubled.end(), period.begin(), period.end());
    Word longer_suffix = period;
    longer_suffix.insert(longer_suffix.end(), suffix.begin(), suffix.end());
    ASSERT_EQ(AnchoredPast(doubled, longer_suffix), p);

    ASSERT_DOUBLE_EQ(q.upper_density(1), p.upper_density(1));
  }
}

TEST(AnchoredPast, UpperDensity) {
  const Alphabet a = Alphabet::binary();
  EXPECT_DOUBLE_EQ(AnchoredPast::parse(a, "(1)0000").upper_density(1), 1.0);
  EXPECT_DOUBLE_EQ(AnchoredPast::parse(a, "(10)").upper_density(1), 0.5);
  EXPECT_DOUBLE_EQ(AnchoredPast::parse(a, "(0)1").upper_density(1), 0.0);
}

TEST(AnchoredPast, Dominates) {
  const Alphabet a = Alphabet::binary();
  EXPECT_TRUE(dominates(AnchoredPast::parse(a, "(1)"), AnchoredPast::parse(a, "(0)1")));
  EXPECT_FALSE(dominates(AnchoredPast::parse(a, "(0)1"), AnchoredPast::parse(a, "(1)")));
  EXPECT_TRUE(dominates(AnchoredPast::parse(a, "(01)1"), AnchoredPast::parse(a, "(01)1")));
}

TEST(QRule, HarmonicTelescopes) {
  const QRule q = QRule::harmonic();
  for (std::size_t k : {1u, 5u, 100u, 10000u}) {
    // prod_{i<=k} i/(i+1) = 1/(k+1)
    EXPECT_NEAR(std::exp(q.log_survival(1, k)), 1.0 / static_cast<double>(k + 1), 1e-12);
  }
  EXPECT_EQ(q.limit(), 0.0);
}

TEST(QRule, PowerSurvival) {
  const QRule q = QRule::power(2.0);
  // prod_{i<=k} (i/(i+1))^2 = (k+1)^-2
  EXPECT_NEAR(std::exp(q.log_survival(1, 50)), 1.0 / (51.0 * 51.0), 1e-13);
}

TEST(QRule, JsonRoundTrip) {
  const QRule q = QRule::table({0.9, 0.1}, QRule::alternating(0.2, 0.6));
  const QRule r = QRule::from_json(q.to_json());
  for (std::size_t i = 1; i < 20; ++i) EXPECT_EQ(q(i), r(i));
  EXPECT_EQ(q.to_json(), r.to_json());
  EXPECT_THROW(QRule::from_json(nlohmann::json{{"kind", "constant"}, {"value", 1.5}}), Error);
}

TEST(QRule, SupInfOverTails) {
  const QRule q = QRule::alternating(0.2, 0.6);
  EXPECT_DOUBLE_EQ(q.sup_from(3), 0.6);
  EXPECT_DOUBLE_EQ(q.inf_from(3), 0.2);
  EXPECT_FALSE(q.limit().has_value());
}

TEST(Philox, KnownAnswer) {
  // Random123 known-answer vector for philox4x32-10 with counter and key all ones bits
  const auto out = Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu},
                                         {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out[0], 0x408f276du);
  EXPECT_EQ(out[1], 0x41c83b0eu);
  EXPECT_EQ(out[2], 0xa20bc7c6u);
  EXPECT_EQ(out[3], 0x6d5451fdu);
  const auto zero = Philox4x32::bijection({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(zero[0], 0x6627e8d5u);
  EXPECT_EQ(zero[1], 0xe169c58du);
  EXPECT_EQ(zero[2], 0xbc57ac4cu);
  EXPECT_EQ(zero[3], 0x9b00dbd8u);
}

TEST(Philox, StreamsReplayAndDiffer) {
  UniformStream a(5, 0), b(5, 0), c(5, 1);
  double mean = 0.0;
  int same = 0;
  for (int i = 0; i < 10000; ++i) {
    const double x = a.next();
    ASSERT_EQ(x, b.next());
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    same += (x == c.next());
    mean += x;
  }
  EXPECT_EQ(same, 0);
  EXPECT_NEAR(mean / 10000.0, 0.5, 0.02);
}
