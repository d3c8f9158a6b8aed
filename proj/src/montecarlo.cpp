#include "gmeasure/montecarlo.hpp"

#include <cmath>
#include <sstream>

namespace gmeasure {

namespace {

constexpr std::uint64_t kMaxJointCells = std::uint64_t{1} << 24;

std::string tail_text(const Alphabet& a, const AnchoredPast& p, const Word& w, std::size_t keep) {
  const AnchoredPast full = p.appended(w);
  std::string s = full.to_string(a);
  if (s.size() > keep + 3) s = "..." + s.substr(s.size() - keep);
  return s;
}

double beta_from_joint(const std::vector<double>& joint, std::uint64_t side) {
  std::vector<double> pu(side, 0.0), pv(side, 0.0);
  for (std::uint64_t u = 0; u < side; ++u)
    for (std::uint64_t v = 0; v < side; ++v) {
      pu[u] += joint[u * side + v];
      pv[v] += joint[u * side + v];
    }
  double b = 0.0;
  for (std::uint64_t u = 0; u < side; ++u)
    for (std::uint64_t v = 0; v < side; ++v) b += std::abs(joint[u * side + v] - pu[u] * pv[v]);
  return std::min(1.0, 0.5 * b);
}

}  // namespace

Trajectory sample(const GModel& m, const AnchoredPast& p, std::size_t T, std::uint64_t seed) {
  return Trajectory{p, m.descriptor(), seed, simulate(m, p, T, seed, 0)};
}

MarginalEstimate empirical_marginal_series(const GModel& m, const AnchoredPast& p, std::size_t I, std::size_t reps,
                                           std::uint64_t seed, Symbol target, Exec exec) {
  require(reps > 0, "need at least one replica");
  m.check_symbol(target);
  const auto counts = hit_counts(m, p, I, target, reps, seed, exec);
  MarginalEstimate out;
  out.reps = reps;
  out.seed = seed;
  const double N = static_cast<double>(reps);
  for (auto c : counts) {
    const double f = static_cast<double>(c) / N;
    out.estimate.push_back(f);
    out.std_error.push_back(std::sqrt(f * (1.0 - f) / N));
  }
  return out;
}

CoupledTrajectory ordered_coupling(const GModel& upper, const GModel& lower, const AnchoredPast& p,
                                   const AnchoredPast& p_lower, std::size_t T, std::uint64_t seed) {
  require(upper.alphabet() == lower.alphabet(), "coupled models must share an alphabet");
  require(dominates(p, p_lower), "upper past must dominate the lower past coordinatewise");
  const Alphabet& alpha = upper.alphabet();
  const std::size_t A = alpha.size();
  auto wu = upper.walker(p);
  auto wl = lower.walker(p_lower);
  UniformStream rng(seed, 0);
  CoupledTrajectory out;
  out.seed = seed;
  out.x.reserve(T);
  out.y.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    // stochastic order: every upper tail mass P(X >= c) dominates the lower one
    double tail_u = 0.0, tail_l = 0.0;
    for (std::size_t c = A; c-- > 1;) {
      tail_u += wu->prob(static_cast<Symbol>(c));
      tail_l += wl->prob(static_cast<Symbol>(c));
      if (tail_u < tail_l - 1e-12) {
        std::ostringstream msg;
        msg << "kernels not ordered at time " << t << ": P_upper(>= " << alpha.glyph(static_cast<Symbol>(c))
            << ") = " << tail_u << " < P_lower = " << tail_l << " for upper past "
            << tail_text(alpha, p, out.x, 32) << " and lower past " << tail_text(alpha, p_lower, out.y, 32);
        fail(ErrorCode::kOrderingViolated, msg.str());
      }
    }
    const double u = rng.next();
    const Symbol x = draw(*wu, A, u);
    const Symbol y = draw(*wl, A, u);
    if (x < y) {
      std::ostringstream msg;
      msg << "pathwise order lost at time " << t << " with u = " << u;
      fail(ErrorCode::kOrderingViolated, msg.str());
    }
    out.x.push_back(x);
    out.y.push_back(y);
    wu->push(x);
    wl->push(y);
  }
  return out;
}

MixingEstimate beta_window_estimate(const GModel& m, const AnchoredPast& p, std::size_t n, std::size_t w,
                                    std::size_t burn, std::size_t reps, std::uint64_t seed, Exec exec) {
  require(w >= 1 && n >= 1, "window width and gap must be positive");
  require(burn + 1 >= w, "burn-in must cover the first window");
  require(reps > 0, "need at least one replica");
  const Alphabet& alpha = m.alphabet();
  const std::uint64_t side = alpha.word_count(w);
  require(side * side <= kMaxJointCells, "window too wide for a joint histogram");
  const std::size_t T = burn + n + w;
  std::vector<std::uint64_t> counts(side * side, 0);
  auto run = [&](std::size_t r, std::vector<std::uint64_t>& local) {
    const Word x = simulate(m, p, T, seed, r);
    const auto u = alpha.rank(WordView(x).subspan(burn + 1 - w, w));
    const auto v = alpha.rank(WordView(x).subspan(burn + n, w));
    ++local[u * side + v];
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(side * side, 0);
#pragma omp for schedule(dynamic, 64)
      for (std::int64_t r = 0; r < static_cast<std::int64_t>(reps); ++r) run(static_cast<std::size_t>(r), local);
#pragma omp critical
      for (std::size_t i = 0; i < local.size(); ++i) counts[i] += local[i];
    }
  } else {
    for (std::size_t r = 0; r < reps; ++r) run(r, counts);
  }
  const double N = static_cast<double>(reps);
  std::vector<double> joint(counts.size());
  for (std::size_t i = 0; i < counts.size(); ++i) joint[i] = static_cast<double>(counts[i]) / N;
  std::vector<double> pu(side, 0.0), pv(side, 0.0);
  for (std::uint64_t u = 0; u < side; ++u)
    for (std::uint64_t v = 0; v < side; ++v) {
      pu[u] += joint[u * side + v];
      pv[v] += joint[u * side + v];
    }
  double se = 0.0;
  for (std::uint64_t u = 0; u < side; ++u)
    for (std::uint64_t v = 0; v < side; ++v) {
      const double q = pu[u] * pv[v];
      se += std::sqrt(q * (1.0 - q) / N);
    }
  se *= 0.5;
  return MixingEstimate{w, n, burn, beta_from_joint(joint, side), se, 3.0 * se, reps, false};
}

MixingEstimate beta_window_exact(const GModel& m, const AnchoredPast& p, std::size_t n, std::size_t w,
                                 std::size_t burn, const ExactOptions& opts) {
  require(w >= 1 && n >= 1, "window width and gap must be positive");
  require(burn + 1 >= w, "burn-in must cover the first window");
  const Alphabet& alpha = m.alphabet();
  const std::size_t L = 2 * w + n - 1;
  const std::uint64_t cells = alpha.word_count(L);
  if (cells > kMaxJointCells) fail(ErrorCode::kResourceCap, "exact joint window too wide; use sampling");
  const CylinderTable t = shifted_table(m, p, burn + 1 - w, L, opts);
  const std::uint64_t side = alpha.word_count(w);
  const std::uint64_t middle = alpha.word_count(n - 1);
  std::vector<double> joint(side * side, 0.0);
  // rank = (u * middle + gap) * side + v
  for (std::uint64_t r = 0; r < cells; ++r) {
    const std::uint64_t v = r % side;
    const std::uint64_t u = r / side / middle;
    joint[u * side + v] += t.prob[r];
  }
  return MixingEstimate{w, n, burn, beta_from_joint(joint, side), 0.0, 0.0, 0, true};
}

OverflowResult overflow_count(const GModel& m, const AnchoredPast& p, std::size_t T, std::uint64_t seed) {
  OverflowResult out;
  out.y = simulate(m, p, T, seed, 0);
  out.indicator.resize(T);
  for (std::size_t n = 1; n <= T; ++n) {
    out.indicator[n - 1] = m.is_context_suffix(WordView(out.y).first(n)) ? 1 : 0;
    out.count += out.indicator[n - 1];
  }
  return out;
}

}  // namespace gmeasure
