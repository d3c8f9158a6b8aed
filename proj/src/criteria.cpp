#include "gmeasure/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gmeasure/models.hpp"

namespace gmeasure {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kKeptPartialSums = 1024;

// sum_{m > a} m^{-alpha}, alpha > 1, with integral bounds on the remainder past M
std::pair<double, double> zeta_tail(double alpha, std::size_t a, double scale, double tol, std::size_t k_max,
                                    std::size_t& terms) {
  const double want = std::pow(std::max(scale, 1e-300) / tol, 1.0 / alpha);
  const auto M = static_cast<std::size_t>(
      std::clamp(want, static_cast<double>(a + 1), static_cast<double>(std::max(k_max, a + 1))));
  double s = 0.0, c = 0.0;
  for (std::size_t m = M; m > a; --m) {  // smallest terms first
    const double x = std::pow(static_cast<double>(m), -alpha);
    const double t = s + x;
    c += (s - t) + x;
    s = t;
  }
  terms = M - a;
  s += c;
  const double lo = s + std::pow(static_cast<double>(M + 1), 1.0 - alpha) / (alpha - 1.0);
  const double hi = s + std::pow(static_cast<double>(M), 1.0 - alpha) / (alpha - 1.0);
  return {lo, hi};
}

const QRule& strip_tables(const QRule& q) {
  const QRule* r = &q;
  while (r->kind() == QRule::Kind::kTable) r = &r->child();
  return *r;
}

bool contains_factor(WordView word, WordView v) {
  return std::search(word.begin(), word.end(), v.begin(), v.end()) != word.end();
}

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::kHolds: return "holds";
    case Verdict::kFails: return "fails";
    case Verdict::kInconclusive: return "inconclusive-at-cap";
    case Verdict::kNotApplicable: return "not-applicable";
  }
  return "?";
}

std::string status_name(VResult::Status s) {
  switch (s) {
    case VResult::Status::kFinite: return "finite";
    case VResult::Status::kDiverges: return "diverges";
    case VResult::Status::kInconclusive: return "inconclusive";
  }
  return "?";
}

nlohmann::json CriterionReport::to_json() const {
  return {{"criterion", criterion}, {"model", model},   {"verdict", verdict_name(verdict)},
          {"certificate", certificate}, {"series", series}, {"caps", caps}};
}

VResult v_of_q(const QRule& q, double tol, std::size_t k_max) {
  require(tol > 0.0, "tolerance must be positive");
  VResult out;
  const auto shape = q.shape();
  double P = 1.0, sum = 0.0, comp = 0.0;
  std::size_t k = 1;
  auto step = [&] {
    P *= 1.0 - q(k);
    const double t = sum + P;
    comp += (sum - t) + P;
    sum = t;
    if (out.partial_sums.size() < kKeptPartialSums) out.partial_sums.push_back(sum + comp);
    ++k;
  };
  auto finish = [&](double lo, double hi, std::string cert) {
    out.status = VResult::Status::kFinite;
    out.lower = lo;
    out.upper = hi;
    out.value = 0.5 * (lo + hi);
    out.terms = k - 1;
    out.certificate = std::move(cert);
    return out;
  };

  while (k < shape.start && k <= k_max) {
    step();
    if (P == 0.0) return finish(sum + comp, sum + comp, "product vanishes at k=" + std::to_string(k - 1));
  }
  if (k < shape.start) {
    out.lower = sum + comp;
    out.upper = kInf;
    out.terms = k - 1;
    return out;
  }

  if (shape.periodic) {
    // from `start` the factors repeat with the period, so the tail is geometric
    const double P0 = P, head = sum + comp;
    double rho = 1.0, block = 0.0;
    for (std::size_t j = 0; j < shape.period; ++j) {
      rho *= 1.0 - q(shape.start + j);
      block += P0 * rho;
    }
    while (out.partial_sums.size() < kKeptPartialSums && k < shape.start + 4 * shape.period) step();
    if (rho >= 1.0) {
      out.status = VResult::Status::kDiverges;
      out.lower = sum + comp;
      out.upper = out.value = kInf;
      out.terms = k - 1;
      out.certificate = "q vanishes on a full period from i=" + std::to_string(shape.start);
      return out;
    }
    const double v = head + block / (1.0 - rho);
    return finish(v, v,
                  "periodic from i=" + std::to_string(shape.start) + " with period " + std::to_string(shape.period) +
                      ", ratio " + std::to_string(rho));
  }

  const double L = shape.limit;
  if (L > 0.0) {
    // q_i >= L from here on, so the remaining terms are below P (1-L)/L
    while (P * (1.0 - L) / L > tol && k <= k_max) step();
    const double lo = sum + comp;
    return finish(lo, lo + P * (1.0 - L) / L,
                  "q_i >= " + std::to_string(L) + " beyond i=" + std::to_string(shape.start) + ", geometric tail");
  }

  const QRule& core = strip_tables(q);
  const std::size_t a = shape.start;  // core rule governs indices >= a
  if (core.kind() == QRule::Kind::kHarmonic || (core.kind() == QRule::Kind::kPower && core.alpha() <= 1.0)) {
    out.status = VResult::Status::kDiverges;
    out.lower = sum + comp;
    out.upper = out.value = kInf;
    out.terms = k - 1;
    out.certificate = "prod_{i=" + std::to_string(a) + "}^k (1-q_i) >= " + std::to_string(a) + "/(k+1), harmonic sum";
    return out;
  }
  if (core.kind() == QRule::Kind::kPower) {
    // P_k = P_{a-1} (a/(k+1))^alpha for k >= a-1
    const double alpha = core.alpha();
    const double coef = P * std::pow(static_cast<double>(a), alpha);
    const std::size_t before = k - 1;
    while (out.partial_sums.size() < kKeptPartialSums && k <= k_max) step();
    std::size_t terms = 0;
    const auto [lo, hi] = zeta_tail(alpha, a, coef, tol, k_max, terms);
    double prefix = 0.0, Pp = 1.0;
    for (std::size_t i = 1; i < a; ++i) {
      Pp *= 1.0 - q(i);
      prefix += Pp;
    }
    auto r = finish(prefix + coef * lo, prefix + coef * hi,
                    "prod (1-q_i) ~ (k+1)^{-" + std::to_string(alpha) + "}, integral bounds on the remainder");
    r.terms = before + terms;
    return r;
  }

  while (k <= k_max && P > tol) step();
  out.lower = sum + comp;
  out.upper = kInf;
  out.terms = k - 1;
  if (P <= tol) out.certificate = "running product below tolerance but no tail bound";
  return out;
}

MResult m_of_q(const QRule& q, double tol, std::size_t k_max) {
  MResult out{v_of_q(q, tol, k_max), std::nullopt};
  if (out.v.status == VResult::Status::kFinite) out.value = 1.0 + out.v.value;
  return out;
}

GrowthSeries growth_series(const GModel& m, std::size_t N) {
  GrowthSeries g;
  for (std::size_t n = 1; n <= N; ++n) {
    const auto t = m.count_contexts(n);
    const auto d = m.count_discontinuity_prefixes(n);
    g.contexts.push_back(t);
    g.discontinuities.push_back(d);
    g.context_root.push_back(std::pow(static_cast<double>(t), 1.0 / static_cast<double>(n)));
    g.discontinuity_root.push_back(std::pow(static_cast<double>(d), 1.0 / static_cast<double>(n)));
  }
  return g;
}

PressureSeries pressure_series(const GModel& m, std::size_t N, std::size_t cap) {
  PressureSeries ps;
  for (std::size_t n = 1; n <= N; ++n) {
    const SupProduct s = m.log_pressure_sum(n, cap);
    ps.exact = ps.exact && s.exact;
    ps.p.push_back(s.log_value / static_cast<double>(n));
    const auto d = m.count_discontinuity_prefixes(n);
    ps.count_bound.push_back(d == 0 ? kLogZero : std::log(static_cast<double>(d)) / static_cast<double>(n));
  }
  ps.limit = m.pressure_limit();
  if (ps.limit) {
    if (ps.limit->log_value < 0.0) {
      ps.verdict = Verdict::kHolds;
      ps.certificate = ps.limit->exact ? "closed-form limit " + std::to_string(ps.limit->log_value)
                                       : "certified upper bound " + std::to_string(ps.limit->log_value);
    } else if (ps.limit->exact) {
      ps.verdict = Verdict::kFails;
      ps.certificate = "closed-form limit " + std::to_string(ps.limit->log_value);
    }
  }
  return ps;
}

VFreeResult v_free_check(const PrefixFamily& family, WordView v, std::size_t N, std::size_t cap) {
  require(!v.empty(), "v must be nonempty");
  VFreeResult out;
  for (std::size_t n = v.size(); n <= N; ++n) {
    if (cap < 64 && family.count(n) > (std::uint64_t{1} << cap)) break;
    family.visit(n, [&](WordView w) {
      if (!out.witness && contains_factor(w, v)) out.witness = Word(w.begin(), w.end());
    });
    out.checked_up_to = n;
    if (out.witness) {
      out.verdict = Verdict::kFails;
      return out;
    }
  }
  out.certificate = family.v_free_certificate(v);
  out.verdict = out.certificate.empty() ? Verdict::kInconclusive : Verdict::kHolds;
  return out;
}

VFreeResult v_free_check(const GModel& m, WordView v, std::size_t N, std::size_t cap) {
  return v_free_check(DiscontinuityFamily(m), v, N, cap);
}

CriterionReport corollary5_check(const GModel& m, std::size_t N, std::size_t cap) {
  const double eps = m.inf_g();
  if (!(eps > 0.0)) fail(ErrorCode::kNotApplicable, "explicit uniqueness criterion needs inf g > 0");
  const double A = static_cast<double>(m.alphabet().size());
  const double threshold = 1.0 / (1.0 - (A - 1.0) * eps);
  (void)cap;
  const GrowthSeries g = growth_series(m, N);

  CriterionReport r;
  r.criterion = "explicit-uniqueness";
  r.model = m.descriptor();
  r.series = {{"n_tau", g.contexts}, {"tau_root", g.context_root}, {"epsilon", eps}, {"threshold", threshold}};
  r.caps = {{"N", N}, {"enumeration_cap", cap}};
  const auto cert = m.growth_certificate();
  if (!cert) {
    r.verdict = Verdict::kInconclusive;
    r.certificate = "no analytic growth rate; finite-N roots only";
  } else {
    r.series["growth_rate"] = *cert;
    r.verdict = *cert < threshold ? Verdict::kHolds : Verdict::kFails;
    r.certificate = "limsup |tau^n|^{1/n} = " + std::to_string(*cert) + (*cert < threshold ? " < " : " >= ") +
                    std::to_string(threshold);
  }
  return r;
}

SummabilityResult summability_classifier(double alpha, double delta, std::size_t I, std::uint64_t c1) {
  require(alpha > 1.0, "alpha must exceed 1");
  require(delta > 0.0, "delta must be positive");
  require(I >= 4, "truncation too small");
  const GeneralizedRenewalModel model(QRule::power(alpha), 0.5, 0.5, c1, delta);
  SummabilityResult out;
  out.summable = delta + 1.0 < alpha;
  // C[m] = sum_{t=1}^{m} t^{-alpha}; inner(i) = C[i] - C[H^{<-}(i)]
  std::vector<double> C(I + 1, 0.0);
  for (std::size_t t = 1; t <= I; ++t) C[t] = C[t - 1] + std::pow(static_cast<double>(t), -alpha);
  double total = 0.0;
  std::size_t next = 1;
  for (std::size_t i = 1; i <= I; ++i) {
    const std::size_t hi = model.H_inverse(i);
    if (hi < i) total += C[i] - C[hi];
    if (i == next || i == I) {
      out.at.push_back(i);
      out.partial.push_back(total);
      next *= 2;
    }
  }
  const std::size_t z = out.partial.size();
  if (z >= 3) {
    const double d1 = out.partial[z - 1] - out.partial[z - 2];
    const double d0 = out.partial[z - 2] - out.partial[z - 3];
    out.trend = d0 > 0.0 ? d1 / d0 : 0.0;
  }
  return out;
}

SandwichRates sr_sandwich(const GModel& m, std::size_t K) {
  std::optional<QRule> s, r;
  if (const auto* ren = dynamic_cast<const RenewalModel*>(&m)) {
    s = ren->q();
    r = ren->q();
  } else if (const auto* gen = dynamic_cast<const GeneralizedRenewalModel*>(&m)) {
    s = gen->s();
    r = gen->r_rule();
  } else {
    fail(ErrorCode::kCapability, m.family() + " has no closed-form s/r rates");
  }
  SandwichRates out;
  for (std::size_t i = 1; i <= K; ++i) {
    out.s.push_back((*s)(i));
    out.r.push_back((*r)(i));
  }
  out.v_s = v_of_q(*s);
  out.v_r = v_of_q(*r);
  switch (out.v_s.status) {
    case VResult::Status::kFinite: out.existence = Verdict::kHolds; break;
    case VResult::Status::kDiverges: out.existence = Verdict::kFails; break;
    default: break;
  }
  switch (out.v_r.status) {
    case VResult::Status::kDiverges: out.nonexistence = Verdict::kHolds; break;
    case VResult::Status::kFinite: out.nonexistence = Verdict::kFails; break;
    default: break;
  }
  return out;
}

}  // namespace gmeasure
