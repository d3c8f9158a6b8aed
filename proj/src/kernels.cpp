#include "gmeasure/kernels.hpp"

#include <algorithm>

#include <cmath>

namespace gmeasure {

namespace {

void fill_row(const Walker& w, std::size_t depth, std::size_t n, std::size_t A, std::uint64_t rank, double mass,
              double* row) {
  if (depth + 1 == n) {
    for (std::size_t a = 0; a < A; ++a) row[rank * A + a] = mass * w.prob(static_cast<Symbol>(a));
    return;
  }
  for (std::size_t a = 0; a < A; ++a) {
    const double pa = w.prob(static_cast<Symbol>(a));
    if (pa <= 0.0) continue;
    auto child = w.clone();
    child->push(static_cast<Symbol>(a));
    fill_row(*child, depth + 1, n, A, rank * A + a, mass * pa, row);
  }
}

// Neumaier step
inline void add_compensated(double& sum, double& comp, double x) {
  const double t = sum + x;
  if (std::abs(sum) >= std::abs(x))
    comp += (sum - t) + x;
  else
    comp += (x - t) + sum;
  sum = t;
}

}  // namespace

Symbol draw(const Walker& w, std::size_t alphabet_size, double u) {
  double cum = 0.0;
  Symbol last = 0;
  for (std::size_t a = 0; a < alphabet_size; ++a) {
    const double p = w.prob(static_cast<Symbol>(a));
    if (p <= 0.0) continue;
    last = static_cast<Symbol>(a);
    cum += p;
    if (u < cum) return last;
  }
  return last;
}

Word simulate(const GModel& m, const AnchoredPast& p, std::size_t T, std::uint64_t seed, std::uint64_t stream) {
  const std::size_t A = m.alphabet().size();
  auto wk = m.walker(p);
  UniformStream rng(seed, stream);
  Word x(T);
  for (std::size_t t = 0; t < T; ++t) {
    x[t] = draw(*wk, A, rng.next());
    wk->push(x[t]);
  }
  return x;
}

std::vector<double> window_table(const std::vector<const Walker*>& walkers, const std::vector<double>& weights,
                                 std::size_t n, std::size_t A, Exec exec) {
  require(walkers.size() == weights.size(), "window_table: walkers and weights differ in length");
  std::uint64_t width = 1;
  for (std::size_t i = 0; i < n; ++i) width *= A;
  std::vector<double> sum(width, 0.0), comp(width, 0.0);
  if (n == 0) {
    for (double w : weights) add_compensated(sum[0], comp[0], w);
    return {sum[0] + comp[0]};
  }
  const std::size_t S = walkers.size();
  const std::size_t block = std::max<std::size_t>(1, (std::size_t{1} << 24) / width);
  std::vector<double> rows;
  for (std::size_t b0 = 0; b0 < S; b0 += block) {
    const std::size_t b1 = std::min(S, b0 + block);
    rows.assign((b1 - b0) * width, 0.0);
    const auto nrows = static_cast<std::int64_t>(b1 - b0);
    if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(dynamic, 4)
      for (std::int64_t r = 0; r < nrows; ++r)
        fill_row(*walkers[b0 + r], 0, n, A, 0, 1.0, rows.data() + r * width);
    } else {
      for (std::int64_t r = 0; r < nrows; ++r) fill_row(*walkers[b0 + r], 0, n, A, 0, 1.0, rows.data() + r * width);
    }
    const auto W = static_cast<std::int64_t>(width);
    auto reduce = [&](std::int64_t w) {
      for (std::int64_t r = 0; r < nrows; ++r) add_compensated(sum[w], comp[w], weights[b0 + r] * rows[r * width + w]);
    };
    if (exec == Exec::kParallel) {
#pragma omp parallel for schedule(static)
      for (std::int64_t w = 0; w < W; ++w) reduce(w);
    } else {
      for (std::int64_t w = 0; w < W; ++w) reduce(w);
    }
  }
  for (std::uint64_t w = 0; w < width; ++w) sum[w] += comp[w];
  return sum;
}

std::vector<std::uint64_t> hit_counts(const GModel& m, const AnchoredPast& p, std::size_t I, Symbol target,
                                      std::size_t reps, std::uint64_t seed, Exec exec) {
  std::vector<std::uint64_t> counts(I + 1, 0);
  auto run = [&](std::size_t r, std::vector<std::uint64_t>& local) {
    const Word x = simulate(m, p, I + 1, seed, r);
    for (std::size_t i = 0; i <= I; ++i) local[i] += x[i] == target;
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(I + 1, 0);
#pragma omp for schedule(dynamic, 16)
      for (std::int64_t r = 0; r < static_cast<std::int64_t>(reps); ++r) run(static_cast<std::size_t>(r), local);
#pragma omp critical
      for (std::size_t i = 0; i <= I; ++i) counts[i] += local[i];
    }
  } else {
    for (std::size_t r = 0; r < reps; ++r) run(r, counts);
  }
  return counts;
}

std::vector<std::uint64_t> window_counts(const GModel& m, const AnchoredPast& p, std::size_t start, std::size_t n,
                                         std::size_t reps, std::uint64_t seed, Exec exec) {
  const Alphabet& alpha = m.alphabet();
  const std::uint64_t width = alpha.word_count(n);
  require(width <= (1u << 24), "window too wide for a histogram");
  std::vector<std::uint64_t> counts(width, 0);
  auto run = [&](std::size_t r, std::vector<std::uint64_t>& local) {
    const Word x = simulate(m, p, start + n, seed, r);
    ++local[alpha.rank(WordView(x).subspan(start, n))];
  };
  if (exec == Exec::kParallel) {
#pragma omp parallel
    {
      std::vector<std::uint64_t> local(width, 0);
#pragma omp for schedule(dynamic, 64)
      for (std::int64_t r = 0; r < static_cast<std::int64_t>(reps); ++r) run(static_cast<std::size_t>(r), local);
#pragma omp critical
      for (std::uint64_t i = 0; i < width; ++i) counts[i] += local[i];
    }
  } else {
    for (std::size_t r = 0; r < reps; ++r) run(r, counts);
  }
  return counts;
}

}  // namespace gmeasure
