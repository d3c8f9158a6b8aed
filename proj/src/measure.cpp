#include "gmeasure/measure.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace gmeasure {

namespace {

struct Compensated {
  double sum = 0.0;
  double comp = 0.0;
  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + comp; }
};

double word_prob(const Walker& start, WordView w) {
  if (w.empty()) return 1.0;
  auto wk = start.clone();
  double acc = 1.0;
  for (std::size_t t = 0; t < w.size(); ++t) {
    const double pr = wk->prob(w[t]);
    if (pr <= 0.0) return 0.0;
    acc *= pr;
    if (t + 1 < w.size()) wk->push(w[t]);
  }
  return acc;
}

std::string mode_name(Provenance::Mode m) { return m == Provenance::Mode::kExact ? "exact" : "monte-carlo"; }

}  // namespace

// ---- CylinderTable ----

double CylinderTable::at(WordView w) const {
  require(w.size() == n, "word length does not match the table");
  return prob.at(alphabet.rank(w));
}

double CylinderTable::total() const {
  Compensated c;
  for (double p : prob) c.add(p);
  return c.value();
}

CylinderTable CylinderTable::prefix_marginal(std::size_t m) const {
  require(m <= n, "marginal longer than the table");
  CylinderTable out{alphabet, m, std::vector<double>(alphabet.word_count(m), 0.0), provenance};
  const std::uint64_t tail = alphabet.word_count(n - m);
  for (std::uint64_t r = 0; r < prob.size(); ++r) out.prob[r / tail] += prob[r];
  return out;
}

CylinderTable CylinderTable::suffix_marginal(std::size_t m) const {
  require(m <= n, "marginal longer than the table");
  CylinderTable out{alphabet, m, std::vector<double>(alphabet.word_count(m), 0.0), provenance};
  const std::uint64_t width = alphabet.word_count(m);
  for (std::uint64_t r = 0; r < prob.size(); ++r) out.prob[r % width] += prob[r];
  return out;
}

void CylinderTable::write_csv(std::ostream& out, const nlohmann::json& header) const {
  nlohmann::json h = header;
  h["alphabet"] = alphabet.glyphs();
  h["n"] = n;
  h["mode"] = mode_name(provenance.mode);
  if (provenance.mode == Provenance::Mode::kMonteCarlo) {
    h["samples"] = provenance.samples;
    h["seed"] = provenance.seed;
  }
  out << "# " << h.dump() << "\nword,probability\n";
  char buf[64];
  for (std::uint64_t r = 0; r < prob.size(); ++r) {
    std::snprintf(buf, sizeof buf, "%.17g", prob[r]);
    out << alphabet.format(alphabet.unrank(r, n)) << ',' << buf << '\n';
  }
}

CylinderTable CylinderTable::read_csv(std::istream& in, nlohmann::json* header) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)) && line.rfind("# ", 0) == 0, "table CSV lacks a header line");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line.substr(2));
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorCode::kValidation, std::string("table CSV header: ") + e.what());
  }
  require(h.contains("alphabet") && h.contains("n"), "table CSV header needs alphabet and n");
  CylinderTable t;
  t.alphabet = Alphabet(h["alphabet"].get<std::string>());
  t.n = h["n"].get<std::size_t>();
  if (h.value("mode", "exact") == "monte-carlo") {
    t.provenance.mode = Provenance::Mode::kMonteCarlo;
    t.provenance.samples = h.value("samples", std::uint64_t{0});
    t.provenance.seed = h.value("seed", std::uint64_t{0});
  }
  t.prob.assign(t.alphabet.word_count(t.n), 0.0);
  std::vector<bool> seen(t.prob.size(), false);
  require(static_cast<bool>(std::getline(in, line)) && line == "word,probability", "table CSV lacks column names");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, "malformed table row: " + line);
    const Word w = t.alphabet.parse(line.substr(0, comma));
    require(w.size() == t.n, "table row of the wrong length: " + line);
    const auto r = t.alphabet.rank(w);
    require(!seen[r], "duplicate table row: " + line);
    seen[r] = true;
    t.prob[r] = std::stod(line.substr(comma + 1));
  }
  for (bool s : seen) require(s, "table CSV is missing rows");
  if (header) *header = std::move(h);
  return t;
}

// ---- ForwardPass ----

ForwardPass::ForwardPass(const GModel& m, const AnchoredPast& p, std::size_t horizon, const ExactOptions& opts)
    : m_(&m), opts_(opts), horizon_(horizon) {
  Entry e;
  e.walker = m.walker(p);
  e.key = key_of(*e.walker, horizon_);
  e.weight = 1.0;
  entries_.push_back(std::move(e));
}

StateKey ForwardPass::key_of(const Walker& w, std::size_t horizon) {
  if (auto k = w.key(horizon)) return std::move(*k);
  return StateKey{std::numeric_limits<std::int64_t>::min(), serial_++};
}

void ForwardPass::advance() {
  const std::size_t A = m_->alphabet().size();
  const std::size_t remaining = horizon_ > time_ + 1 ? horizon_ - time_ - 1 : 0;
  std::map<StateKey, std::size_t> index;
  std::vector<Entry> next;
  std::vector<Compensated> mass;
  for (const Entry& e : entries_) {
    for (std::size_t a = 0; a < A; ++a) {
      const double pa = e.walker->prob(static_cast<Symbol>(a));
      if (pa <= 0.0) continue;
      auto child = e.walker->clone();
      child->push(static_cast<Symbol>(a));
      StateKey k = key_of(*child, remaining);
      auto [it, fresh] = index.try_emplace(std::move(k), next.size());
      if (fresh) {
        if (next.size() >= opts_.max_states)
          fail(ErrorCode::kResourceCap, "exact forward pass exceeded " + std::to_string(opts_.max_states) +
                                            " states at time " + std::to_string(time_ + 1) +
                                            "; use Monte Carlo mode or raise --max-exact-states");
        next.push_back(Entry{it->first, 0.0, std::move(child)});
        mass.emplace_back();
      }
      mass[it->second].add(e.weight * pa);
    }
  }
  // fixed key order keeps every downstream reduction deterministic
  entries_.clear();
  entries_.reserve(next.size());
  for (const auto& [k, i] : index) {
    next[i].weight = mass[i].value();
    entries_.push_back(std::move(next[i]));
  }
  ++time_;
}

std::vector<double> ForwardPass::window(std::size_t n) const {
  std::vector<const Walker*> ws;
  std::vector<double> weights;
  ws.reserve(entries_.size());
  for (const Entry& e : entries_) {
    ws.push_back(e.walker.get());
    weights.push_back(e.weight);
  }
  return window_table(ws, weights, n, m_->alphabet().size(), opts_.exec);
}

// ---- exact measures ----

Prob mu_x_cylinder(const GModel& m, const AnchoredPast& p, WordView w) {
  const LogWeight l = m.g_n_log(p, w);
  return l == kLogZero ? 0.0 : std::exp(l);
}

Prob shifted_marginal(const GModel& m, const AnchoredPast& p, std::size_t i, WordView w, const ExactOptions& opts) {
  for (Symbol a : w) m.check_symbol(a);
  ForwardPass fp(m, p, i + w.size(), opts);
  for (std::size_t t = 0; t < i; ++t) fp.advance();
  Compensated c;
  for (const auto& e : fp.entries()) c.add(e.weight * word_prob(*e.walker, w));
  return c.value();
}

CylinderTable shifted_table(const GModel& m, const AnchoredPast& p, std::size_t i, std::size_t n,
                            const ExactOptions& opts) {
  ForwardPass fp(m, p, i + n, opts);
  for (std::size_t t = 0; t < i; ++t) fp.advance();
  return CylinderTable{m.alphabet(), n, fp.window(n), {}};
}

std::vector<double> marginal_series(const GModel& m, const AnchoredPast& p, std::size_t I, WordView w,
                                    const ExactOptions& opts) {
  for (Symbol a : w) m.check_symbol(a);
  ForwardPass fp(m, p, I + w.size(), opts);
  std::vector<double> out;
  out.reserve(I + 1);
  for (std::size_t i = 0; i <= I; ++i) {
    if (i > 0) fp.advance();
    Compensated c;
    for (const auto& e : fp.entries()) c.add(e.weight * word_prob(*e.walker, w));
    out.push_back(c.value());
  }
  return out;
}

std::vector<CylinderTable> cesaro_tables(const GModel& m, const AnchoredPast& p, std::size_t k_max, std::size_t n,
                                         const ExactOptions& opts) {
  require(k_max >= 1, "Cesaro averages need k >= 1");
  require(n >= 1, "cylinder length must be positive");
  ForwardPass fp(m, p, k_max - 1 + n, opts);
  const std::uint64_t width = m.alphabet().word_count(n);
  std::vector<Compensated> acc(width);
  std::vector<CylinderTable> out;
  out.reserve(k_max);
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (k > 1) fp.advance();
    const auto row = fp.window(n);
    CylinderTable t{m.alphabet(), n, std::vector<double>(width), {}};
    for (std::uint64_t r = 0; r < width; ++r) {
      acc[r].add(row[r]);
      t.prob[r] = acc[r].value() / static_cast<double>(k);
    }
    out.push_back(std::move(t));
  }
  return out;
}

CylinderTable cesaro_table(const GModel& m, const AnchoredPast& p, std::size_t k, std::size_t n,
                           const ExactOptions& opts) {
  auto all = cesaro_tables(m, p, k, n, opts);
  return std::move(all.back());
}

std::vector<double> renewal_marginals(const QRule& q, double q_inf, std::optional<std::size_t> ell0, std::size_t I) {
  // a[t]: first 1 at time t; f[d]: gap d between consecutive 1s
  std::vector<double> a(I + 1), f(I + 1, 0.0), u(I + 1);
  double survive = 1.0;
  for (std::size_t t = 0; t <= I; ++t) {
    const double qt = ell0 ? q(*ell0 + t) : q_inf;
    a[t] = survive * qt;
    survive *= 1.0 - qt;
  }
  survive = 1.0;
  for (std::size_t d = 1; d <= I; ++d) {
    f[d] = survive * q(d);
    survive *= 1.0 - q(d);
  }
  for (std::size_t t = 0; t <= I; ++t) {
    Compensated c;
    c.add(a[t]);
    for (std::size_t tau = 0; tau < t; ++tau) c.add(u[tau] * f[t - tau]);
    u[t] = c.value();
  }
  return u;
}

double compatibility_residual(const GModel& m, const CylinderTable& t, WordView w, Symbol a) {
  require(t.n == w.size() + 1, "table length must be |w| + 1");
  m.check_symbol(a);
  if (m.is_context_suffix(w))
    fail(ErrorCode::kNotApplicable, "word " + m.alphabet().format(w) + " does not fix the context");
  Word wa(w.begin(), w.end());
  wa.push_back(0);
  Compensated denom;
  for (std::size_t b = 0; b < m.alphabet().size(); ++b) {
    wa.back() = static_cast<Symbol>(b);
    denom.add(t.at(wa));
  }
  if (denom.value() <= 0.0)
    fail(ErrorCode::kUndefinedResidual, "cylinder " + m.alphabet().format(w) + " has zero mass");
  wa.back() = a;
  const AnchoredPast past(Word{0}, Word(w.begin(), w.end()));
  return t.at(wa) / denom.value() - m.eval(past, a);
}

SandwichVerdict sandwich_check(const GModel& m, const CylinderTable& t) {
  const double eps = m.inf_g();
  if (!(eps > 0.0)) fail(ErrorCode::kNotApplicable, "sandwich bound needs inf g > 0");
  SandwichVerdict v;
  v.epsilon = eps;
  v.lower = std::pow(eps, static_cast<double>(t.n));
  v.upper = std::pow(1.0 - eps, static_cast<double>(t.n));
  v.min_entry = std::numeric_limits<double>::infinity();
  v.max_entry = -std::numeric_limits<double>::infinity();
  constexpr double slack = 1e-12;
  for (double p : t.prob) {
    v.min_entry = std::min(v.min_entry, p);
    v.max_entry = std::max(v.max_entry, p);
    if (p < v.lower * (1.0 - slack) || p > v.upper * (1.0 + slack)) ++v.violations;
  }
  v.holds = v.violations == 0;
  return v;
}

CylinderTable monte_carlo_table(const GModel& m, const AnchoredPast& p, std::size_t i, std::size_t n,
                                std::size_t samples, std::uint64_t seed, Exec exec) {
  require(samples > 0, "Monte Carlo needs at least one sample");
  const auto counts = window_counts(m, p, i, n, samples, seed, exec);
  CylinderTable t{m.alphabet(), n, std::vector<double>(counts.size()), {Provenance::Mode::kMonteCarlo, samples, seed}};
  for (std::size_t r = 0; r < counts.size(); ++r)
    t.prob[r] = static_cast<double>(counts[r]) / static_cast<double>(samples);
  return t;
}

}  // namespace gmeasure
