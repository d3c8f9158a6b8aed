#include "gmeasure/qrule.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "gmeasure/error.hpp"

namespace gmeasure {

namespace {

bool in_unit(double x) { return x >= 0.0 && x <= 1.0 && std::isfinite(x); }

void reject_unknown(const nlohmann::json& j, std::initializer_list<const char*> allowed) {
  for (const auto& item : j.items()) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return item.key() == k; });
    require(known, "unknown field '" + item.key() + "' in q-rule");
  }
}

}  // namespace

QRule QRule::constant(double c) {
  require(in_unit(c), "constant q must lie in [0,1]");
  return QRule(Kind::kConstant, c, 0.0);
}

QRule QRule::harmonic() { return QRule(Kind::kHarmonic, 0.0, 0.0); }

QRule QRule::power(double alpha) {
  require(alpha > 0.0 && std::isfinite(alpha), "power rule needs alpha > 0");
  return QRule(Kind::kPower, alpha, 0.0);
}

QRule QRule::alternating(double odd, double even) {
  require(in_unit(odd) && in_unit(even), "alternating q values must lie in [0,1]");
  return QRule(Kind::kAlternating, odd, even);
}

QRule QRule::table(std::vector<double> head, QRule tail) {
  for (double v : head) require(in_unit(v), "table q values must lie in [0,1]");
  QRule r(Kind::kTable, 0.0, 0.0);
  r.head_ = std::move(head);
  r.child_ = std::make_shared<const QRule>(std::move(tail));
  return r;
}

QRule QRule::affine(QRule base, double offset, double scale) {
  require(scale >= 0.0 && offset >= 0.0, "affine q rule needs nonnegative offset and scale");
  require(offset + scale * base.sup_from(1) <= 1.0 + 1e-15, "affine q rule leaves [0,1]");
  QRule r(Kind::kAffine, offset, scale);
  r.child_ = std::make_shared<const QRule>(std::move(base));
  return r;
}

double QRule::operator()(std::size_t i) const {
  require(i >= 1, "q is indexed from 1");
  switch (kind_) {
    case Kind::kConstant: return a_;
    case Kind::kHarmonic: return 1.0 / static_cast<double>(i + 1);
    case Kind::kPower: {
      const double x = static_cast<double>(i);
      // 1 - (i/(i+1))^a, written to avoid cancellation for large i
      return -std::expm1(a_ * -std::log1p(1.0 / x));
    }
    case Kind::kAlternating: return (i % 2 == 1) ? a_ : b_;
    case Kind::kTable: return i <= head_.size() ? head_[i - 1] : (*child_)(i);
    case Kind::kAffine: return a_ + b_ * (*child_)(i);
  }
  return 0.0;
}

std::optional<double> QRule::limit() const {
  switch (kind_) {
    case Kind::kConstant: return a_;
    case Kind::kHarmonic:
    case Kind::kPower: return 0.0;
    case Kind::kAlternating:
      if (a_ == b_) return a_;
      return std::nullopt;
    case Kind::kTable: return child_->limit();
    case Kind::kAffine: {
      const auto l = child_->limit();
      if (!l) return std::nullopt;
      return a_ + b_ * *l;
    }
  }
  return std::nullopt;
}

double QRule::sup_from(std::size_t i) const {
  i = std::max<std::size_t>(i, 1);
  switch (kind_) {
    case Kind::kConstant: return a_;
    case Kind::kHarmonic:
    case Kind::kPower: return (*this)(i);
    case Kind::kAlternating: return std::max(a_, b_);
    case Kind::kTable: {
      double best = child_->sup_from(std::max(i, head_.size() + 1));
      for (std::size_t k = i; k <= head_.size(); ++k) best = std::max(best, head_[k - 1]);
      return best;
    }
    case Kind::kAffine: return a_ + b_ * child_->sup_from(i);
  }
  return 1.0;
}

double QRule::inf_from(std::size_t i) const {
  i = std::max<std::size_t>(i, 1);
  switch (kind_) {
    case Kind::kConstant: return a_;
    case Kind::kHarmonic:
    case Kind::kPower: return 0.0;
    case Kind::kAlternating: return std::min(a_, b_);
    case Kind::kTable: {
      double best = child_->inf_from(std::max(i, head_.size() + 1));
      for (std::size_t k = i; k <= head_.size(); ++k) best = std::min(best, head_[k - 1]);
      return best;
    }
    case Kind::kAffine: return a_ + b_ * child_->inf_from(i);
  }
  return 0.0;
}

QRule::TailShape QRule::shape() const {
  switch (kind_) {
    case Kind::kConstant: return {true, 1, 1, a_};
    case Kind::kHarmonic:
    case Kind::kPower: return {false, 1, 1, 0.0};
    case Kind::kAlternating: return {true, 1, 2, 0.0};
    case Kind::kTable: {
      TailShape s = child_->shape();
      s.start = std::max(s.start, head_.size() + 1);
      return s;
    }
    case Kind::kAffine: {
      TailShape s = child_->shape();
      s.limit = a_ + b_ * s.limit;
      return s;
    }
  }
  return {};
}

bool QRule::strictly_interior() const {
  switch (kind_) {
    case Kind::kConstant: return a_ > 0.0 && a_ < 1.0;
    case Kind::kHarmonic:
    case Kind::kPower: return true;
    case Kind::kAlternating: return a_ > 0.0 && a_ < 1.0 && b_ > 0.0 && b_ < 1.0;
    case Kind::kTable:
      return std::all_of(head_.begin(), head_.end(), [](double v) { return v > 0.0 && v < 1.0; }) &&
             child_->strictly_interior();
    case Kind::kAffine:
      return (a_ > 0.0 || (b_ > 0.0 && child_->strictly_interior())) && a_ + b_ * child_->sup_from(1) < 1.0;
  }
  return false;
}

double QRule::log_survival(std::size_t a, std::size_t b) const {
  a = std::max<std::size_t>(a, 1);
  if (a > b) return 0.0;
  const double n = static_cast<double>(b - a + 1);
  switch (kind_) {
    case Kind::kConstant: return n * std::log1p(-a_);
    case Kind::kHarmonic:
      // prod i/(i+1) telescopes
      return std::log(static_cast<double>(a)) - std::log(static_cast<double>(b + 1));
    case Kind::kPower:
      return a_ * (std::log(static_cast<double>(a)) - std::log(static_cast<double>(b + 1)));
    case Kind::kAlternating: {
      const std::size_t odds = (b + 1) / 2 - a / 2;
      const std::size_t evens = (b - a + 1) - odds;
      return static_cast<double>(odds) * std::log1p(-a_) + static_cast<double>(evens) * std::log1p(-b_);
    }
    case Kind::kTable: {
      double s = 0.0;
      for (std::size_t k = a; k <= std::min(b, head_.size()); ++k) s += std::log1p(-head_[k - 1]);
      return s + child_->log_survival(std::max(a, head_.size() + 1), b);
    }
    case Kind::kAffine: {
      double s = 0.0;
      for (std::size_t k = a; k <= b; ++k) s += std::log1p(-(*this)(k));
      return s;
    }
  }
  return 0.0;
}

nlohmann::json QRule::to_json() const {
  using nlohmann::json;
  switch (kind_) {
    case Kind::kConstant: return json{{"kind", "constant"}, {"value", a_}};
    case Kind::kHarmonic: return json{{"kind", "harmonic"}};
    case Kind::kPower: return json{{"kind", "power"}, {"alpha", a_}};
    case Kind::kAlternating: return json{{"kind", "alternating"}, {"odd", a_}, {"even", b_}};
    case Kind::kTable: return json{{"kind", "table"}, {"values", head_}, {"tail", child_->to_json()}};
    case Kind::kAffine:
      return json{{"kind", "affine"}, {"base", child_->to_json()}, {"offset", a_}, {"scale", b_}};
  }
  return json{};
}

QRule QRule::from_json(const nlohmann::json& j) {
  require(j.is_object() && j.contains("kind") && j["kind"].is_string(), "q-rule needs a string 'kind'");
  const std::string kind = j["kind"];
  if (kind == "constant") {
    reject_unknown(j, {"kind", "value"});
    return constant(j.at("value").get<double>());
  }
  if (kind == "harmonic") {
    reject_unknown(j, {"kind"});
    return harmonic();
  }
  if (kind == "power") {
    reject_unknown(j, {"kind", "alpha"});
    return power(j.at("alpha").get<double>());
  }
  if (kind == "alternating") {
    reject_unknown(j, {"kind", "odd", "even"});
    return alternating(j.at("odd").get<double>(), j.at("even").get<double>());
  }
  if (kind == "table") {
    reject_unknown(j, {"kind", "values", "tail"});
    return table(j.at("values").get<std::vector<double>>(), from_json(j.at("tail")));
  }
  if (kind == "affine") {
    reject_unknown(j, {"kind", "base", "offset", "scale"});
    return affine(from_json(j.at("base")), j.at("offset").get<double>(), j.at("scale").get<double>());
  }
  fail(ErrorCode::kValidation, "unknown q-rule kind '" + kind + "'");
}

}  // namespace gmeasure
