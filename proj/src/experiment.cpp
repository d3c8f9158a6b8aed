#include "gmeasure/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "gmeasure/criteria.hpp"
#include "gmeasure/measure.hpp"
#include "gmeasure/models.hpp"
#include "gmeasure/montecarlo.hpp"
#include "gmeasure/treebuilder.hpp"

namespace gmeasure {

namespace {

using nlohmann::json;

void only_fields(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
  require(j.is_object(), where + " must be a JSON object");
  for (const auto& item : j.items())
    require(std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return item.key() == k; }),
            "unknown field '" + item.key() + "' in " + where);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// CSV text whose first line echoes the config that produced it
class Csv {
 public:
  Csv(const ExperimentConfig& c, std::initializer_list<std::string> columns) {
    out_ << "# " << c.to_json().dump() << '\n';
    bool first = true;
    for (const auto& col : columns) {
      out_ << (first ? "" : ",") << col;
      first = false;
    }
    out_ << '\n';
  }
  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }
  std::string str() const { return out_.str(); }

 private:
  static std::string cell(double v) { return num(v); }
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  template <class I>
    requires std::is_integral_v<I>
  static std::string cell(I v) { return std::to_string(v); }

  std::ostringstream out_;
};

template <class T>
T param(const json& p, const char* key, T fallback) {
  try {
    return p.contains(key) ? p.at(key).get<T>() : fallback;
  } catch (const json::exception& e) {
    fail(ErrorCode::kValidation, std::string("parameter '") + key + "': " + e.what());
  }
}

json sup_json(const std::optional<SupProduct>& s) {
  if (!s) return nullptr;
  return {{"log_value", std::isinf(s->log_value) ? json("-inf") : json(s->log_value)}, {"exact", s->exact}};
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

json v_json(const VResult& v) {
  return {{"status", status_name(v.status)}, {"value", finite_or_string(v.value)},
          {"lower", finite_or_string(v.lower)}, {"upper", finite_or_string(v.upper)},
          {"terms", v.terms}, {"certificate", v.certificate}};
}

struct Context {
  const ExperimentConfig& config;
  ExactOptions exact;
  std::unique_ptr<GModel> model;
  std::optional<AnchoredPast> past;
  ResultBundle* bundle;

  const GModel& m() const {
    require(model != nullptr, "operation '" + config.operation + "' needs a model");
    return *model;
  }
  const AnchoredPast& p() const { return *past; }
};

json op_criteria(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"N", "v", "K"}, "criteria parameters");
  const auto N = param<std::size_t>(P, "N", 12);
  const GModel& m = c.m();
  json out;

  const GrowthSeries g = growth_series(m, N);
  const PressureSeries ps = pressure_series(m, N, c.config.enumeration_cap);
  Csv csv(c.config, {"n", "tau", "discontinuities", "tau_root", "pressure", "count_bound"});
  for (std::size_t n = 1; n <= N; ++n)
    csv.row(n, g.contexts[n - 1], g.discontinuities[n - 1], g.context_root[n - 1], ps.p[n - 1],
            ps.count_bound[n - 1]);
  c.bundle->tables["criteria.csv"] = csv.str();

  out["growth_certificate"] = m.growth_certificate() ? json(*m.growth_certificate()) : json(nullptr);
  out["pressure"] = {{"verdict", verdict_name(ps.verdict)}, {"limit", sup_json(ps.limit)},
                     {"exact_series", ps.exact}, {"certificate", ps.certificate}};
  if (m.inf_g() > 0.0) {
    out["explicit_uniqueness"] = corollary5_check(m, N).to_json();
  } else {
    out["explicit_uniqueness"] = {{"verdict", verdict_name(Verdict::kNotApplicable)}, {"reason", "inf g = 0"}};
  }
  if (P.contains("v")) {
    const Word v = m.alphabet().parse(P["v"].get<std::string>());
    const VFreeResult vf = v_free_check(m, v, N, c.config.enumeration_cap);
    out["v_free"] = {{"v", P["v"]}, {"verdict", verdict_name(vf.verdict)}, {"checked_up_to", vf.checked_up_to},
                     {"certificate", vf.certificate},
                     {"witness", vf.witness ? json(m.alphabet().format(*vf.witness)) : json(nullptr)}};
  }
  if (m.family() == "renewal" || m.family() == "generalized_renewal") {
    const SandwichRates sr = sr_sandwich(m, param<std::size_t>(P, "K", 20));
    out["sr_sandwich"] = {{"s", sr.s},           {"r", sr.r},
                          {"V_s", v_json(sr.v_s)}, {"V_r", v_json(sr.v_r)},
                          {"existence", verdict_name(sr.existence)},
                          {"nonexistence", verdict_name(sr.nonexistence)}};
  }
  return out;
}

json op_marginal_series(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"I", "reps", "word", "exact"}, "marginal-series parameters");
  const auto I = param<std::size_t>(P, "I", 20);
  const auto reps = param<std::size_t>(P, "reps", 0);
  const bool exact = param<bool>(P, "exact", true);
  const GModel& m = c.m();
  const Word w = m.alphabet().parse(param<std::string>(P, "word", "1"));
  require(!w.empty(), "target word must be nonempty");
  require(reps == 0 || w.size() == 1, "Monte Carlo series take a single-symbol target");

  std::vector<double> ex;
  if (exact) ex = marginal_series(m, c.p(), I, w, c.exact);
  MarginalEstimate mc;
  if (reps > 0) mc = empirical_marginal_series(m, c.p(), I, reps, c.config.seed, w[0]);

  Csv csv(c.config, {"i", "exact", "monte_carlo", "std_error"});
  for (std::size_t i = 0; i <= I; ++i)
    csv.row(i, exact ? num(ex[i]) : std::string(), reps ? num(mc.estimate[i]) : std::string(),
            reps ? num(mc.std_error[i]) : std::string());
  c.bundle->tables["marginal_series.csv"] = csv.str();

  json out = {{"I", I}, {"reps", reps}, {"word", m.alphabet().format(w)}};
  if (exact) out["exact_last"] = ex.back();
  if (reps) out["monte_carlo_last"] = mc.estimate.back();
  if (const auto* ren = dynamic_cast<const RenewalModel*>(&m)) {
    const MResult mq = m_of_q(ren->q());
    out["V"] = v_json(mq.v);
    out["inverse_mean_return"] = mq.value ? json(1.0 / *mq.value)
                                          : (mq.v.status == VResult::Status::kDiverges ? json(0.0) : json(nullptr));
  }
  return out;
}

json op_sample(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"T"}, "sample parameters");
  const auto T = param<std::size_t>(P, "T", 1000);
  const GModel& m = c.m();
  const Trajectory tr = sample(m, c.p(), T, c.config.seed);
  Csv csv(c.config, {"t", "x"});
  std::vector<std::size_t> freq(m.alphabet().size(), 0);
  for (std::size_t t = 0; t < T; ++t) {
    csv.row(t, std::string(1, m.alphabet().glyph(tr.x[t])));
    ++freq[tr.x[t]];
  }
  c.bundle->tables["trajectory.csv"] = csv.str();
  json f = json::object();
  for (std::size_t a = 0; a < freq.size(); ++a)
    f[std::string(1, m.alphabet().glyph(static_cast<Symbol>(a)))] =
        T ? static_cast<double>(freq[a]) / static_cast<double>(T) : 0.0;
  return {{"T", T}, {"frequency", f}};
}

json op_cesaro(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"k", "n"}, "cesaro parameters");
  const auto k = param<std::size_t>(P, "k", 50);
  const auto n = param<std::size_t>(P, "n", 3);
  const GModel& m = c.m();
  const CylinderTable t = cesaro_table(m, c.p(), k, n, c.exact);
  std::ostringstream csv;
  t.write_csv(csv, {{"model", m.descriptor()}, {"past", c.p().to_string(m.alphabet())}, {"k", k}});
  c.bundle->tables["cesaro.csv"] = csv.str();
  json out = {{"k", k}, {"n", n}, {"total", t.total()}};
  if (m.inf_g() > 0.0) {
    const SandwichVerdict v = sandwich_check(m, t);
    out["sandwich"] = {{"holds", v.holds},         {"epsilon", v.epsilon},     {"lower", v.lower},
                       {"upper", v.upper},         {"min_entry", v.min_entry}, {"max_entry", v.max_entry},
                       {"violations", v.violations}};
  }
  json residuals = json::array();
  for (std::uint64_t r = 0; r < m.alphabet().word_count(n - 1); ++r) {
    const Word w = m.alphabet().unrank(r, n - 1);
    for (std::size_t a = 0; a < m.alphabet().size(); ++a) {
      try {
        residuals.push_back({{"w", m.alphabet().format(w)},
                             {"a", std::string(1, m.alphabet().glyph(static_cast<Symbol>(a)))},
                             {"residual", compatibility_residual(m, t, w, static_cast<Symbol>(a))}});
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kNotApplicable && e.code() != ErrorCode::kUndefinedResidual) throw;
      }
    }
  }
  out["residuals"] = residuals;
  return out;
}

json op_couple(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"T", "lower_model", "lower_past"}, "couple parameters");
  const auto T = param<std::size_t>(P, "T", 10000);
  require(P.contains("lower_model"), "couple needs 'lower_model'");
  const auto lower = model_from_json(P["lower_model"]);
  const GModel& m = c.m();
  const AnchoredPast lp =
      P.contains("lower_past") ? AnchoredPast::parse(m.alphabet(), P["lower_past"].get<std::string>()) : c.p();
  const CoupledTrajectory ct = ordered_coupling(m, *lower, c.p(), lp, T, c.config.seed);
  Csv csv(c.config, {"t", "x", "y"});
  std::size_t gaps = 0;
  for (std::size_t t = 0; t < T; ++t) {
    csv.row(t, std::string(1, m.alphabet().glyph(ct.x[t])), std::string(1, m.alphabet().glyph(ct.y[t])));
    gaps += ct.x[t] != ct.y[t];
  }
  c.bundle->tables["coupling.csv"] = csv.str();
  return {{"T", T}, {"dominance", true}, {"steps_apart", gaps}};
}

json op_beta(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"w", "gaps", "burn", "reps", "exact"}, "beta parameters");
  const auto w = param<std::size_t>(P, "w", 1);
  const auto gaps = param<std::vector<std::size_t>>(P, "gaps", {1, 2, 4, 8});
  const auto burn = param<std::size_t>(P, "burn", 1000);
  const auto reps = param<std::size_t>(P, "reps", 10000);
  const bool exact = param<bool>(P, "exact", false);
  const GModel& m = c.m();
  Csv csv(c.config, {"gap", "estimate", "half_width", "exact"});
  json rows = json::array();
  for (std::size_t n : gaps) {
    const MixingEstimate e = exact ? beta_window_exact(m, c.p(), n, w, burn, c.exact)
                                   : beta_window_estimate(m, c.p(), n, w, burn, reps, c.config.seed);
    csv.row(n, e.estimate, e.half_width, exact ? 1 : 0);
    rows.push_back({{"gap", n}, {"estimate", e.estimate}, {"half_width", e.half_width}});
  }
  c.bundle->tables["beta.csv"] = csv.str();
  return {{"w", w}, {"burn", burn}, {"reps", exact ? 0 : reps}, {"estimates", rows},
          {"note", "window-restricted lower bound on beta(n)"}};
}

json op_overflow(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"T"}, "overflow parameters");
  const auto T = param<std::size_t>(P, "T", 1000);
  const OverflowResult o = overflow_count(c.m(), c.p(), T, c.config.seed);
  Csv csv(c.config, {"n", "overflow"});
  std::size_t last = 0;
  for (std::size_t n = 1; n <= T; ++n) {
    csv.row(n, static_cast<int>(o.indicator[n - 1]));
    if (o.indicator[n - 1]) last = n;
  }
  c.bundle->tables["overflow.csv"] = csv.str();
  return {{"T", T}, {"count", o.count}, {"last_overflow", last}};
}

json op_appendix_tree(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"construction", "f", "N", "exact", "words_up_to"}, "appendix-tree parameters");
  const auto construction = param<std::string>(P, "construction", "figure2");
  const auto N = param<std::size_t>(P, "N", 12);
  const bool exact = param<bool>(P, "exact", false);
  const auto words_up_to = param<std::size_t>(P, "words_up_to", 0);
  require(words_up_to <= 12, "word listings are limited to n <= 12");
  std::optional<BuiltTree> bt;
  if (construction == "figure2") {
    bt = BuiltTree::figure2();
  } else {
    require(P.contains("f"), construction + " needs a growth rule 'f'");
    const GrowthRule f = GrowthRule::from_json(P["f"]);
    if (construction == "tree1")
      bt = BuiltTree::tree1(f, N, exact);
    else if (construction == "tree2")
      bt = BuiltTree::tree2(f, N, exact);
    else
      fail(ErrorCode::kValidation, "unknown construction '" + construction + "'");
  }
  const auto rows = growth_crosscheck(*bt, N);
  Csv csv(c.config, {"n", "d", "closed_form", "enumerated", "target"});
  json d = json::array();
  for (const auto& r : rows) {
    csv.row(r.n, r.adjusted, r.closed_form, r.enumerated, r.target ? std::to_string(*r.target) : std::string());
    d.push_back(r.adjusted);
  }
  c.bundle->tables["appendix_tree.csv"] = csv.str();
  json out = {{"construction", tree_kind_name(bt->kind())}, {"breakpoints", bt->breakpoints()},
              {"d", d}, {"crosscheck", "holds"}};
  if (words_up_to > 0) {
    json words = json::object();
    const Alphabet bin = Alphabet::binary();
    for (std::size_t n = 1; n <= words_up_to; ++n) {
      json level = json::array();
      bt->visit(n, [&](WordView w) { level.push_back(bin.format(w)); });
      words[std::to_string(n)] = level;
    }
    out["words"] = words;
  }
  return out;
}

json op_summability(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"alphas", "deltas", "I", "c1"}, "summability parameters");
  const auto alphas = param<std::vector<double>>(P, "alphas", {1.5, 2.0, 2.5, 3.0});
  const auto deltas = param<std::vector<double>>(P, "deltas", {0.25, 0.5, 1.0, 1.5, 2.0});
  const auto I = param<std::size_t>(P, "I", std::size_t{1} << 16);
  const auto c1 = param<std::uint64_t>(P, "c1", 1);
  Csv csv(c.config, {"alpha", "delta", "summable", "partial_sum", "trend"});
  json grid = json::array();
  for (double a : alphas)
    for (double d : deltas) {
      const SummabilityResult s = summability_classifier(a, d, I, c1);
      csv.row(a, d, s.summable ? 1 : 0, s.partial.back(), s.trend);
      grid.push_back({{"alpha", a}, {"delta", d}, {"summable", s.summable}, {"partial_sum", s.partial.back()},
                      {"trend", s.trend}});
    }
  c.bundle->tables["summability.csv"] = csv.str();
  return {{"I", I}, {"c1", c1}, {"grid", grid}};
}

json op_spinflip_check(Context& c) {
  const json& P = c.config.params;
  only_fields(P, {"n"}, "spinflip-check parameters");
  const auto n = param<std::size_t>(P, "n", 10);
  const auto* sf = dynamic_cast<const SpinFlipFactor*>(&c.m());
  require(sf != nullptr, "spinflip-check needs a spinflip model");
  Csv csv(c.config, {"n", "total", "max_conditional_gap"});
  double worst_total = 0.0, worst_gap = 0.0;
  for (std::size_t len = 1; len <= n; ++len) {
    double total = 0.0, gap = 0.0;
    Word y(len + 1);
    for (std::uint64_t r = 0; r < sf->alphabet().word_count(len + 1); ++r) {
      y = sf->alphabet().unrank(r, len + 1);
      total += sf->factor_cylinder(y);
    }
    for (std::uint64_t r = 0; r < sf->alphabet().word_count(len); ++r) {
      Word w = sf->alphabet().unrank(r, len);
      w.push_back(1);
      const double up = sf->factor_cylinder(w);
      w.back() = 0;
      const double down = sf->factor_cylinder(w);
      w.pop_back();
      gap = std::max(gap, std::abs(up / (up + down) - sf->conditional_plus(w)));
    }
    csv.row(len, total, gap);
    worst_total = std::max(worst_total, std::abs(total - 1.0));
    worst_gap = std::max(worst_gap, gap);
  }
  c.bundle->tables["spinflip.csv"] = csv.str();
  return {{"n", n}, {"max_total_error", worst_total}, {"max_conditional_gap", worst_gap}};
}

using Op = std::function<json(Context&)>;

const std::vector<std::pair<std::string, Op>>& operations() {
  static const std::vector<std::pair<std::string, Op>> ops = {
      {"criteria", op_criteria},         {"marginal-series", op_marginal_series},
      {"sample", op_sample},             {"cesaro", op_cesaro},
      {"couple", op_couple},             {"beta", op_beta},
      {"overflow", op_overflow},         {"appendix-tree", op_appendix_tree},
      {"summability", op_summability},   {"spinflip-check", op_spinflip_check},
  };
  return ops;
}

bool needs_model(const std::string& op) { return op != "appendix-tree" && op != "summability"; }

}  // namespace

json ExperimentConfig::to_json() const {
  json j = {{"operation", operation},
            {"past", past},
            {"params", params},
            {"seed", seed},
            {"caps", {{"max_exact_states", max_exact_states}, {"enumeration", enumeration_cap}}}};
  if (!model.is_null()) j["model"] = model;
  if (!out.empty()) j["out"] = out;
  return j;
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
  only_fields(j, {"operation", "model", "past", "params", "seed", "caps", "out"}, "experiment config");
  ExperimentConfig c;
  try {
    require(j.contains("operation"), "experiment config needs an 'operation'");
    c.operation = j.at("operation").get<std::string>();
    if (j.contains("model")) c.model = j["model"];
    c.past = j.value("past", c.past);
    if (j.contains("params")) c.params = j["params"];
    require(c.params.is_object(), "'params' must be an object");
    c.seed = j.value("seed", c.seed);
    if (j.contains("caps")) {
      only_fields(j["caps"], {"max_exact_states", "enumeration"}, "caps");
      c.max_exact_states = j["caps"].value("max_exact_states", c.max_exact_states);
      c.enumeration_cap = j["caps"].value("enumeration", c.enumeration_cap);
    }
    c.out = j.value("out", c.out);
  } catch (const json::exception& e) {
    fail(ErrorCode::kValidation, std::string("experiment config: ") + e.what());
  }
  return c;
}

void ResultBundle::write(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  auto put = [&](const std::string& name, const std::string& text) {
    std::ofstream f(dir / name, std::ios::binary);
    require(static_cast<bool>(f), "cannot write " + (dir / name).string());
    f << text;
  };
  put("result.json", result.dump(2) + "\n");
  for (const auto& [name, text] : tables) put(name, text);
  put("diagnostics.json", diagnostics.dump(2) + "\n");
}

std::vector<std::string> operation_names() {
  std::vector<std::string> names;
  for (const auto& [name, op] : operations()) names.push_back(name);
  return names;
}

ResultBundle run(const ExperimentConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  const auto& ops = operations();
  const auto it = std::find_if(ops.begin(), ops.end(), [&](const auto& o) { return o.first == config.operation; });
  if (it == ops.end()) fail(ErrorCode::kValidation, "unknown operation '" + config.operation + "'");

  ResultBundle bundle;
  Context ctx{config, ExactOptions{config.max_exact_states, Exec::kParallel}, nullptr, std::nullopt, &bundle};
  if (needs_model(config.operation)) {
    require(!config.model.is_null(), "operation '" + config.operation + "' needs a 'model'");
    ctx.model = model_from_json(config.model);
    ctx.past = AnchoredPast::parse(ctx.model->alphabet(), config.past);
  }
  json payload = it->second(ctx);
  bundle.result = {{"schema", kResultSchema}, {"config", config.to_json()}, {"payload", std::move(payload)}};
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bundle.diagnostics = {{"wall_seconds", secs},
                        {"caps", {{"max_exact_states", config.max_exact_states},
                                  {"enumeration", config.enumeration_cap}}}};
  return bundle;
}

const std::vector<Preset>& presets() {
  static const std::vector<Preset> list = [] {
    auto cfg = [](std::string op, json model, std::string past, json params) {
      ExperimentConfig c;
      c.operation = std::move(op);
      c.model = std::move(model);
      c.past = std::move(past);
      c.params = std::move(params);
      c.seed = 20240601;
      return c;
    };
    const json harmonic = {{"kind", "harmonic"}};
    std::vector<Preset> v;
    v.push_back({"renewal-case1", "renewal, finite mean return time",
                 "constant q = 0.4: marginals of x_i = 1 sit at 1/m(q) = 0.4",
                 cfg("marginal-series", {{"family", "renewal"}, {"q", {{"kind", "constant"}, {"value", 0.4}}}, {"q_inf", 0.4}},
                     "(0)1", {{"I", 20}, {"reps", 100000}})});
    v.push_back({"renewal-case2", "renewal, infinite mean return time, continuous",
                 "harmonic q with q_inf = 0: marginals decay to 0",
                 cfg("marginal-series", {{"family", "renewal"}, {"q", harmonic}, {"q_inf", 0.0}}, "(0)1",
                     {{"I", 2000}})});
    v.push_back({"renewal-case3", "renewal, non-existence",
                 "harmonic q with q_inf = 0.5: marginals decay although the all-zero past is discontinuous",
                 cfg("marginal-series", {{"family", "renewal"}, {"q", harmonic}, {"q_inf", 0.5}}, "(0)1",
                     {{"I", 2000}, {"reps", 10000}})});
    v.push_back({"trunk-corollary5", "trunk context tree, explicit uniqueness",
                 "|tau^n| <= n against the growth threshold for epsilon = 0.2",
                 cfg("criteria", {{"family", "trunk"}, {"epsilon", 0.2}}, "(0)1", {{"N", 64}})});
    v.push_back({"berger-density", "density-switching counterexample",
                 "dense pasts emit ones at rate 0.3, sparse pasts at 0.7",
                 cfg("sample", {{"family", "berger"}}, "(1)", {{"T", 100000}})});
    v.push_back({"spinflip-claim", "spin-flip factor measure",
                 "cylinder formula normalization and the conditional closed form",
                 cfg("spinflip-check", {{"family", "spinflip"}, {"epsilon", 0.3}}, "(+)", {{"n", 10}})});
    v.push_back({"appendix-figure2", "countable subtree growth",
                 "d(n) of the countable construction with n_1 = 2, n_2 = 4, n_3 = 7",
                 cfg("appendix-tree", nullptr, "(0)1", {{"construction", "figure2"}, {"N", 12}})});
    v.push_back({"generalized-renewal-grid", "generalized renewal, summability",
                 "delta + 1 < alpha on a parameter grid", cfg("summability", nullptr, "(0)1", json::object())});
    return v;
  }();
  return list;
}

const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  fail(ErrorCode::kValidation, "unknown preset '" + name + "'");
}

}  // namespace gmeasure
