#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "gmeasure/core.hpp"

namespace gmeasure {

inline constexpr std::size_t kDefaultEnumerationCap = 24;

using StateKey = std::vector<std::int64_t>;
using WordVisitor = std::function<void(WordView)>;

// Incremental view of one past being extended forward.
class Walker {
 public:
  virtual ~Walker() = default;
  virtual double prob(Symbol a) const = 0;
  virtual void push(Symbol a) = 0;
  virtual std::unique_ptr<Walker> clone() const = 0;
  /// Summary that determines every transition for the next `horizon` steps.
  /// Walkers with equal keys are interchangeable over that horizon.
  virtual std::optional<StateKey> key(std::size_t horizon) const {
    (void)horizon;
    return std::nullopt;
  }
};

struct SupProduct {
  LogWeight log_value = 0.0;
  bool exact = true;  // false: a certified upper bound
};

// A set of finite words closed under taking prefixes of its members in the
// backward reading, indexed by length.  Used for tau^n, D^n and appendix trees.
class PrefixFamily {
 public:
  virtual ~PrefixFamily() = default;
  virtual std::size_t alphabet_size() const = 0;
  virtual void visit(std::size_t n, const WordVisitor& visitor) const = 0;
  virtual std::uint64_t count(std::size_t n) const;
  /// Optional proof that no member of any length contains v; empty when none.
  virtual std::string v_free_certificate(WordView v) const {
    (void)v;
    return {};
  }
};

class GModel {
 public:
  explicit GModel(Alphabet alphabet) : alphabet_(std::move(alphabet)) {}
  virtual ~GModel() = default;
  GModel(const GModel&) = delete;
  GModel& operator=(const GModel&) = delete;

  const Alphabet& alphabet() const noexcept { return alphabet_; }
  virtual std::string family() const = 0;
  virtual nlohmann::json descriptor() const = 0;

  virtual double eval(const AnchoredPast& p, Symbol a) const = 0;
  virtual ContextLength context_length(const AnchoredPast& p) const = 0;
  virtual double variation(const AnchoredPast& p, std::size_t l) const;
  virtual SupProduct sup_gn(WordView w) const;
  virtual double inf_g() const = 0;

  // tau^n and D^n, words in time order.
  virtual void visit_contexts(std::size_t n, const WordVisitor& visitor) const = 0;
  virtual void visit_discontinuity_prefixes(std::size_t n, const WordVisitor& visitor) const = 0;
  virtual std::uint64_t count_contexts(std::size_t n) const;
  virtual std::uint64_t count_discontinuity_prefixes(std::size_t n) const;
  /// Is `word` (time order, length n) an element of tau^n?
  virtual bool is_context_suffix(WordView word) const;

  virtual std::unique_ptr<Walker> walker(const AnchoredPast& p) const;

  /// Analytic value of limsup |tau^n|^{1/n}, when known.
  virtual std::optional<double> growth_certificate() const { return std::nullopt; }
  /// Analytic limit of (1/n) log sum_{D^n} sup g_n when exact is set, otherwise an upper bound on its limsup.
  virtual std::optional<SupProduct> pressure_limit() const { return std::nullopt; }
  /// log sum over D^n of sup g_n; families with a closed form override.
  virtual SupProduct log_pressure_sum(std::size_t n, std::size_t cap) const;
  /// Explicit list of discontinuity points when D_g is finite.
  virtual std::optional<std::vector<AnchoredPast>> discontinuity_points() const { return std::nullopt; }

  // helpers built on the virtual interface
  std::vector<double> distribution(const AnchoredPast& p) const;
  LogWeight g_n_log(const AnchoredPast& p, WordView w) const;
  std::vector<Word> enumerate_contexts(std::size_t n, std::size_t cap = kDefaultEnumerationCap) const;
  std::vector<Word> enumerate_discontinuity_prefixes(std::size_t n,
                                                     std::size_t cap = kDefaultEnumerationCap) const;
  void check_symbol(Symbol a) const;

 private:
  Alphabet alphabet_;
};

/// Length-based cap for brute-force enumeration over all of A^n.
void check_enumeration_cap(std::size_t n, std::size_t cap);
/// Size-based cap: at most 2^cap enumerated words.
void check_count_cap(std::uint64_t count, std::size_t cap);

// Walker that just carries the whole past.
class PastWalker : public Walker {
 public:
  PastWalker(const GModel& model, AnchoredPast past) : model_(&model), past_(std::move(past)) {}
  double prob(Symbol a) const override { return model_->eval(past_, a); }
  void push(Symbol a) override { past_.push_back(a); }
  std::unique_ptr<Walker> clone() const override { return std::make_unique<PastWalker>(*this); }
  const AnchoredPast& past() const noexcept { return past_; }

 protected:
  const GModel* model_;
  AnchoredPast past_;
};

// Adapters so the criteria can treat tau^n / D^n of a model as plain prefix families.
class ContextFamily : public PrefixFamily {
 public:
  explicit ContextFamily(const GModel& m) : m_(m) {}
  std::size_t alphabet_size() const override { return m_.alphabet().size(); }
  void visit(std::size_t n, const WordVisitor& v) const override { m_.visit_contexts(n, v); }
  std::uint64_t count(std::size_t n) const override { return m_.count_contexts(n); }

 private:
  const GModel& m_;
};

class DiscontinuityFamily : public PrefixFamily {
 public:
  explicit DiscontinuityFamily(const GModel& m) : m_(m) {}
  std::size_t alphabet_size() const override { return m_.alphabet().size(); }
  void visit(std::size_t n, const WordVisitor& v) const override { m_.visit_discontinuity_prefixes(n, v); }
  std::uint64_t count(std::size_t n) const override { return m_.count_discontinuity_prefixes(n); }
  std::string v_free_certificate(WordView v) const override;

 private:
  const GModel& m_;
};

/// All backward-infinite words over a sub-alphabet, e.g. {1,3}^N on {1,2,3}.
class FullShiftFamily : public PrefixFamily {
 public:
  FullShiftFamily(std::size_t alphabet_size, std::vector<Symbol> allowed);
  std::size_t alphabet_size() const override { return size_; }
  void visit(std::size_t n, const WordVisitor& v) const override;
  std::uint64_t count(std::size_t n) const override;
  std::string v_free_certificate(WordView v) const override;

 private:
  std::size_t size_;
  std::vector<Symbol> allowed_;
};

}  // namespace gmeasure
