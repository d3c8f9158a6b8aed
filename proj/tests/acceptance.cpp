// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "gmeasure/criteria.hpp"
#include "gmeasure/kernels.hpp"
#include "gmeasure/measure.hpp"
#include "gmeasure/models.hpp"
#include "gmeasure/montecarlo.hpp"
#include "gmeasure/rng.hpp"
#include "gmeasure/treebuilder.hpp"

using namespace gmeasure;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail += (detail.empty() ? "" : "; ") + what;
    }
  }
};

std::string fmt(const char* f, double v) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

const Alphabet kBin = Alphabet::binary();

Outcome renewal_case1() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const QRule q = QRule::constant(0.4);
  const MResult m = m_of_q(q);
  o.check(m.value && std::abs(*m.value - 2.5) < 1e-12, "m(q) != 2.5");
  const RenewalModel model(q, 0.4);
  const AnchoredPast p = AnchoredPast::parse(kBin, "(0)1");
  double worst_exact = 0.0;
  for (std::size_t i = 0; i <= 20; ++i)
    worst_exact = std::max(worst_exact, std::abs(shifted_marginal(model, p, i, Word{1}) - 0.4));
  o.check(worst_exact <= 1e-12, "exact deviation " + fmt("%.3g", worst_exact));
  const MarginalEstimate mc = empirical_marginal_series(model, p, 20, 100000, 20240601);
  double worst_mc = 0.0;
  for (double v : mc.estimate) worst_mc = std::max(worst_mc, std::abs(v - 0.4));
  o.check(worst_mc <= 0.01, "Monte Carlo deviation " + fmt("%.4f", worst_mc));
  const double s = seconds_since(t0);
  o.check(s < 10.0, "runtime " + fmt("%.1f s", s));
  if (o.pass) o.detail = "exact dev " + fmt("%.2g", worst_exact) + ", MC dev " + fmt("%.4f", worst_mc) + ", " + fmt("%.2f s", s);
  return o;
}

Outcome renewal_case3() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const RenewalModel model(QRule::harmonic(), 0.5);
  const AnchoredPast p = AnchoredPast::parse(kBin, "(0)1");
  const MarginalEstimate mc = empirical_marginal_series(model, p, 2000, 10000, 20240601);
  const double last = mc.estimate[2000];
  o.check(last < 0.05, "empirical marginal at i=2000 is " + fmt("%.4f", last) + " (needs < 0.05)");
  const auto exact = renewal_marginals(QRule::harmonic(), 0.5, std::size_t{1}, 2000);
  bool monotone = true;
  for (std::size_t i = 11; i <= 2000; ++i) monotone = monotone && exact[i] < exact[i - 1];
  o.check(monotone, "exact marginals not decreasing on i >= 10");
  const double s = seconds_since(t0);
  o.check(s < 60.0, "runtime " + fmt("%.1f s", s));
  o.detail += (o.detail.empty() ? "" : "; ") + std::string("exact u_2000 = ") + fmt("%.4f", exact[2000]) +
              ", monotone " + (monotone ? "yes" : "no") + ", " + fmt("%.1f s", s);
  return o;
}

Outcome fixture_tree() {
  Outcome o;
  const BuiltTree bt = BuiltTree::figure2();
  const std::uint64_t expected[] = {1, 2, 4, 6, 10, 14, 22, 38};
  for (std::size_t n = 0; n <= 7; ++n) {
    o.check(bt.count(n) == expected[n], "d(" + std::to_string(n) + ") = " + std::to_string(bt.count(n)));
    o.check(bt.closed_form(n) == expected[n], "closed form at " + std::to_string(n));
  }
  try {
    growth_crosscheck(bt, 12);
  } catch (const Error& e) {
    o.check(false, e.what());
  }
  if (o.pass) o.detail = "d(0..7) = 1 2 4 6 10 14 22 38, crosscheck holds to n = 12";
  return o;
}

Outcome trunk_uniqueness() {
  Outcome o;
  const TrunkTreeModel m(0.2);
  for (std::size_t n = 1; n <= 64; ++n) {
    const auto tau = m.enumerate_contexts(n);
    o.check(tau.size() <= n, "|tau^" + std::to_string(n) + "| = " + std::to_string(tau.size()));
  }
  for (double eps : {0.05, 0.2, 0.4}) {
    const CriterionReport r = corollary5_check(TrunkTreeModel(eps), 64);
    o.check(r.verdict == Verdict::kHolds, "eps " + fmt("%.2f", eps) + ": " + verdict_name(r.verdict));
  }
  if (o.pass) o.detail = "|tau^n| <= n to n = 64, holds at eps 0.05 0.2 0.4";
  return o;
}

Outcome pressure_closed_form() {
  Outcome o;
  // q_inf != 0.5 makes 0^n the single discontinuity prefix
  const RenewalModel m(QRule::constant(0.5), 0.75);
  const PressureSeries ps = pressure_series(m, 32);
  double worst = 0.0;
  for (double p : ps.p) worst = std::max(worst, std::abs(p - std::log(0.5)));
  o.check(ps.p.size() == 32, "series length");
  o.check(worst <= 1e-15, "max |p_n - log 0.5| = " + fmt("%.3g", worst));
  if (o.pass) o.detail = "max |p_n - log 0.5| = " + fmt("%.2g", worst) + " for n <= 32";
  return o;
}

Outcome sandwich() {
  Outcome o;
  const RenewalModel case1(QRule::constant(0.4), 0.4);
  const TrunkTreeModel trunk(0.2);
  const BergerModel berger;
  const SpinFlipFactor spin(0.3);
  const std::vector<std::pair<const GModel*, AnchoredPast>> cases{
      {&case1, AnchoredPast::parse(kBin, "(0)1")},
      {&trunk, AnchoredPast::parse(kBin, "(0)1")},
      {&berger, AnchoredPast::parse(kBin, "(1)")},
      {&spin, AnchoredPast::parse(spin.alphabet(), "(+)")}};
  std::size_t tables = 0;
  for (const auto& [m, p] : cases) {
    if (m->inf_g() < 0.1) continue;
    for (std::size_t n = 1; n <= 6; ++n) {
      for (const CylinderTable& t : cesaro_tables(*m, p, 50, n)) {
        const SandwichVerdict v = sandwich_check(*m, t);
        ++tables;
        o.check(v.holds, m->family() + " n=" + std::to_string(n) + " violations " + std::to_string(v.violations));
      }
    }
  }
  if (o.pass) o.detail = std::to_string(tables) + " tables checked";
  return o;
}

Outcome coupling() {
  Outcome o;
  const RenewalModel upper(QRule::power(2.0), 0.5);
  const RenewalModel lower(QRule::power(1.5), 0.3);
  const AnchoredPast p = AnchoredPast::parse(kBin, "(0)1");
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    try {
      const CoupledTrajectory c = ordered_coupling(upper, lower, p, p, 10000, seed);
      for (std::size_t t = 0; t < c.x.size(); ++t)
        if (c.x[t] < c.y[t]) {
          o.check(false, "dominance broken at seed " + std::to_string(seed));
          break;
        }
    } catch (const Error& e) {
      o.check(false, e.what());
    }
  }
  // each coordinate of the coupling against its own exact law on the first three symbols
  const std::size_t reps = 33334;
  std::vector<double> cx(8, 0.0), cy(8, 0.0);
  for (std::size_t r = 0; r < reps; ++r) {
    const CoupledTrajectory c = ordered_coupling(upper, lower, p, p, 3, 1000 + r);
    cx[kBin.rank(c.x)] += 1.0;
    cy[kBin.rank(c.y)] += 1.0;
  }
  const double critical = 18.475;  // chi-square, 7 degrees of freedom, 1%
  std::string stats;
  for (int side = 0; side < 2; ++side) {
    const GModel& m = side == 0 ? static_cast<const GModel&>(upper) : lower;
    const auto& counts = side == 0 ? cx : cy;
    double chi2 = 0.0;
    for (std::uint64_t r = 0; r < 8; ++r) {
      const double e = static_cast<double>(reps) * mu_x_cylinder(m, p, kBin.unrank(r, 3));
      chi2 += (counts[r] - e) * (counts[r] - e) / e;
    }
    const std::string label = std::string(side == 0 ? "upper" : "lower") + " chi-square " + fmt("%.2f", chi2);
    o.check(chi2 < critical, label);
    stats += (stats.empty() ? "" : ", ") + label;
  }
  if (o.pass) o.detail = "20 seeds dominated, " + stats;
  return o;
}

Outcome summability() {
  Outcome o;
  for (double a : {1.5, 2.0, 2.5, 3.0})
    for (double d : {0.25, 0.5, 1.0, 1.5, 2.0})
      for (std::size_t I : {std::size_t{1} << 10, std::size_t{1} << 16}) {
        const bool got = summability_classifier(a, d, I).summable;
        o.check(got == (d + 1.0 < a), "alpha " + fmt("%.2f", a) + " delta " + fmt("%.2f", d));
      }
  if (o.pass) o.detail = "20 grid points at two truncation depths";
  return o;
}

Outcome berger() {
  Outcome o;
  const BergerModel m;
  const auto freq = [&](const char* past) {
    const Trajectory t = sample(m, AnchoredPast::parse(kBin, past), 100000, 20240601);
    double ones = 0.0;
    for (Symbol s : t.x) ones += s;
    return ones / static_cast<double>(t.x.size());
  };
  const double dense = freq("(1)"), sparse = freq("(0)");
  o.check(std::abs(dense - 0.3) <= 0.01, "density-1 past frequency " + fmt("%.4f", dense));
  o.check(std::abs(sparse - 0.7) <= 0.01, "density-0 past frequency " + fmt("%.4f", sparse));
  const PressureSeries ps = pressure_series(m, 20);
  o.check(ps.limit && ps.limit->exact && ps.limit->log_value == 0.0, "pressure limit is not exactly 0");
  o.check(ps.verdict != Verdict::kHolds, "pressure criterion reported as holding");
  if (o.pass)
    o.detail = "frequencies " + fmt("%.4f", dense) + " / " + fmt("%.4f", sparse) + ", pressure verdict " +
               verdict_name(ps.verdict);
  return o;
}

Outcome spinflip() {
  Outcome o;
  const SpinFlipFactor m(0.3);
  const Alphabet& a = m.alphabet();
  for (std::size_t n = 1; n <= 11; ++n) {
    double s = 0.0;
    for (std::uint64_t r = 0; r < a.word_count(n); ++r) s += m.factor_cylinder(a.unrank(r, n));
    o.check(std::abs(s - 1.0) <= 1e-12, "sum at length " + std::to_string(n));
  }
  std::mt19937_64 rng(7);
  double worst = 0.0;
  for (int t = 0; t < 500; ++t) {
    Word past(1 + rng() % 40);
    for (auto& s : past) s = rng() & 1;
    Word plus = past;
    plus.push_back(1);
    worst = std::max(worst, std::abs(m.conditional_plus(past) - m.factor_cylinder(plus) / m.factor_cylinder(past)));
  }
  o.check(worst <= 1e-12, "conditional formula deviation " + fmt("%.3g", worst));
  // preimage x_{-51} .. x_{-1}, i.i.d. with P(-1) = 0.3 and x_{-1} = +1
  UniformStream u(20240601, 0);
  Word x(51);
  for (auto& s : x) s = u.next() < 0.3 ? 0 : 1;
  x.back() = 1;
  const Word y = SpinFlipFactor::image(x);
  const double c = m.conditional_plus(y);
  o.check(y.size() == 50 && std::abs(c - 0.7) < 0.01, "generic conditional " + fmt("%.6f", c));
  if (o.pass) o.detail = "formula dev " + fmt("%.2g", worst) + ", generic conditional " + fmt("%.6f", c);
  return o;
}

Outcome residual() {
  Outcome o;
  const double a = 0.3, b = 0.6;  // P(1|0), P(1|1)
  std::map<Word, std::vector<double>> ctx{{{0}, {1.0 - a, a}}, {{1}, {1.0 - b, b}}};
  const TabulatedTree m(kBin, ctx);
  const std::size_t k = 1000;
  const double bound = 10.0 / static_cast<double>(k);
  const double pi1 = a / (1.0 - b + a);
  double worst_res = 0.0, worst_stat = 0.0;
  for (std::size_t l = 1; l <= 4; ++l) {
    const CylinderTable t = cesaro_table(m, AnchoredPast::parse(kBin, "(0)"), k, l + 1);
    for (std::uint64_t r = 0; r < t.prob.size(); ++r) {
      const Word wa = kBin.unrank(r, l + 1);
      // stationary cylinder probability from the transition matrix
      double s = wa[0] ? pi1 : 1.0 - pi1;
      for (std::size_t j = 1; j < wa.size(); ++j) {
        const double p1 = wa[j - 1] ? b : a;
        s *= wa[j] ? p1 : 1.0 - p1;
      }
      worst_stat = std::max(worst_stat, std::abs(t.prob[r] - s));
      const Word w(wa.begin(), wa.end() - 1);
      try {
        worst_res = std::max(worst_res, std::abs(compatibility_residual(m, t, w, wa.back())));
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotApplicable) o.check(false, e.what());
      }
    }
  }
  o.check(worst_res <= bound, "max residual " + fmt("%.3g", worst_res));
  o.check(worst_stat <= bound, "max distance to stationary " + fmt("%.3g", worst_stat));
  if (o.pass) o.detail = "max residual " + fmt("%.2g", worst_res) + ", max stationary gap " + fmt("%.2g", worst_stat);
  return o;
}

Outcome invariants() {
  Outcome o;
  std::mt19937_64 rng(12);
  auto random_word = [&](std::size_t lo, std::size_t hi, std::size_t A) {
    Word w(lo + rng() % (hi - lo + 1));
    for (auto& s : w) s = static_cast<Symbol>(rng() % A);
    return w;
  };
  std::vector<std::unique_ptr<GModel>> models;
  models.push_back(std::make_unique<RenewalModel>(QRule::harmonic(), 0.5));
  models.push_back(std::make_unique<RenewalModel>(QRule::power(2.0), 0.2));
  models.push_back(std::make_unique<GeneralizedRenewalModel>(QRule::power(2.0), 0.5, 0.5, 1, 0.5));
  models.push_back(std::make_unique<BergerModel>());
  models.push_back(std::make_unique<TrunkTreeModel>(0.2, 1024));
  models.push_back(std::make_unique<SpinFlipFactor>(0.3));
  std::map<Word, std::vector<double>> ctx{{{1}, {0.3, 0.7}}, {{0, 0}, {0.8, 0.2}}, {{1, 0}, {0.45, 0.55}}};
  models.push_back(std::make_unique<TabulatedTree>(kBin, ctx));

  // normalization
  for (const auto& m : models)
    for (int t = 0; t < 100; ++t) {
      const std::size_t A = m->alphabet().size();
      const AnchoredPast p(random_word(1, 4, A), random_word(0, 10, A));
      double s = 0.0;
      for (Symbol a = 0; a < A; ++a) s += m->eval(p, a);
      o.check(std::abs(s - 1.0) <= 1e-12, m->family() + " normalization");
    }

  // telescoping and shift identities
  for (const auto& m : models) {
    if (m->family() == "generalized_renewal") continue;
    const std::size_t A = m->alphabet().size();
    const AnchoredPast p(random_word(1, 3, A), random_word(1, 4, A));
    for (int t = 0; t < 10; ++t) {
      const std::size_t i = 1 + rng() % 12;
      const Word w = random_word(1, 3, A);
      const double base = shifted_marginal(*m, p, i, w);
      double tele = 0.0, shift = 0.0;
      for (Symbol a = 0; a < A; ++a) {
        Word wa = w;
        wa.push_back(a);
        tele += shifted_marginal(*m, p, i, wa);
        Word aw{a};
        aw.insert(aw.end(), w.begin(), w.end());
        shift += shifted_marginal(*m, p, i - 1, aw);
      }
      o.check(std::abs(tele - base) <= 1e-12, m->family() + " telescoping");
      o.check(std::abs(shift - base) <= 1e-12, m->family() + " shift identity");
    }
  }

  // Cesaro near-stationarity
  for (const auto& m : models) {
    if (m->family() == "generalized_renewal") continue;
    const AnchoredPast p(random_word(1, 3, m->alphabet().size()), {});
    for (const std::size_t k : {10u, 50u}) {
      const CylinderTable t = cesaro_table(*m, p, k, 4);
      const CylinderTable a = t.prefix_marginal(3), b = t.suffix_marginal(3);
      for (std::size_t r = 0; r < a.prob.size(); ++r)
        o.check(std::abs(a.prob[r] - b.prob[r]) <= 2.0 / static_cast<double>(k), m->family() + " near-stationarity");
    }
  }

  // exact against Monte Carlo, 4 sigma on at least 99% of cylinders
  std::size_t total = 0, inside = 0;
  for (const auto& m : models) {
    if (m->family() == "generalized_renewal") continue;
    const AnchoredPast p(Word{1}, Word{0, 1});
    for (std::size_t n = 1; n <= 4; ++n) {
      const std::size_t N = 20000;
      const CylinderTable ex = shifted_table(*m, p, 5, n);
      const CylinderTable mc = monte_carlo_table(*m, p, 5, n, N, 77 + n);
      for (std::size_t r = 0; r < ex.prob.size(); ++r) {
        const double q = ex.prob[r];
        ++total;
        inside += std::abs(mc.prob[r] - q) <= 4.0 * std::sqrt(q * (1.0 - q) / static_cast<double>(N)) + 1e-15;
      }
    }
  }
  o.check(static_cast<double>(inside) >= 0.99 * static_cast<double>(total),
          "exact vs MC agreement " + std::to_string(inside) + "/" + std::to_string(total));

  // replay determinism
  for (const auto& m : models) {
    const AnchoredPast p(Word{1}, Word{0});
    o.check(sample(*m, p, 3000, 5).x == sample(*m, p, 3000, 5).x, m->family() + " replay");
    o.check(hit_counts(*m, p, 50, 1, 500, 3, Exec::kSerial) == hit_counts(*m, p, 50, 1, 500, 3, Exec::kParallel),
            m->family() + " serial/parallel replay");
  }
  if (o.pass) o.detail = "MC agreement " + std::to_string(inside) + "/" + std::to_string(total);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"renewal constant q: marginals equal 1/m(q)", renewal_case1},
      {"renewal harmonic q: non-existence signature", renewal_case3},
      {"appendix tree2 fixture table", fixture_tree},
      {"trunk tree explicit uniqueness", trunk_uniqueness},
      {"pressure closed form for constant renewal", pressure_closed_form},
      {"sandwich bound on exact Cesaro tables", sandwich},
      {"monotone coupling dominance and marginals", coupling},
      {"generalized renewal summability grid", summability},
      {"Berger class swap and pressure", berger},
      {"spin-flip factor cylinders and conditionals", spinflip},
      {"compatibility residual for an order-1 chain", residual},
      {"invariant suites", invariants},
  };
  const auto start = std::chrono::steady_clock::now();
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    failed += !o.pass;
    std::printf("criterion %2zu: %s  %s (%s) [%.2f s]\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first.c_str(),
                o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed, total %.1f s\n", failed, criteria.size(), seconds_since(start));
  return failed == 0 ? 0 : 1;
}
