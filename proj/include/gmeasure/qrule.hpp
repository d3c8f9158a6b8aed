#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace gmeasure {

// A sequence q_1, q_2, ... in [0,1] given in closed form, or as an explicit
// head followed by a closed-form tail.  Index tails are summarized exactly.
class QRule {
 public:
  enum class Kind { kConstant, kHarmonic, kPower, kAlternating, kTable, kAffine };

  // Either eventually periodic from `start` with the given period, or
  // nonincreasing from `start` towards `limit`.
  struct TailShape {
    bool periodic = true;
    std::size_t start = 1;
    std::size_t period = 1;
    double limit = 0.0;
  };

  static QRule constant(double c);
  /// q_i = 1/(i+1)
  static QRule harmonic();
  /// q_i = 1 - (i/(i+1))^alpha
  static QRule power(double alpha);
  /// odd indices get `odd`, even indices get `even`
  static QRule alternating(double odd, double even);
  static QRule table(std::vector<double> head, QRule tail);
  /// offset + scale * base_i
  static QRule affine(QRule base, double offset, double scale);

  Kind kind() const noexcept { return kind_; }

  double operator()(std::size_t i) const;
  std::optional<double> limit() const;
  double sup_from(std::size_t i) const;
  double inf_from(std::size_t i) const;
  TailShape shape() const;
  bool strictly_interior() const;

  /// sum_{i=a}^{b} log(1 - q_i); 0 when a > b.
  double log_survival(std::size_t a, std::size_t b) const;

  // parameters, meaningful for the matching kind
  double value() const noexcept { return a_; }
  double alpha() const noexcept { return a_; }
  double odd() const noexcept { return a_; }
  double even() const noexcept { return b_; }
  double offset() const noexcept { return a_; }
  double scale() const noexcept { return b_; }
  const std::vector<double>& head() const noexcept { return head_; }
  const QRule& child() const { return *child_; }

  nlohmann::json to_json() const;
  static QRule from_json(const nlohmann::json& j);

 private:
  QRule(Kind kind, double a, double b) : kind_(kind), a_(a), b_(b) {}

  Kind kind_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::vector<double> head_;
  std::shared_ptr<const QRule> child_;
};

}  // namespace gmeasure
