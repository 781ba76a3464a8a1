// Redexes, single steps, normalization with traces, unfolding, and the
// projection / simulation constructions relating →h and ⊸.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "lsc/term.hpp"

namespace lsc {

enum class Rule : std::uint8_t { Beta, HeadBeta, DB, LS, GC, HeadDB, HeadLS };

inline constexpr Rule kAllRules[] = {Rule::Beta, Rule::HeadBeta, Rule::DB,    Rule::LS,
                                     Rule::GC,   Rule::HeadDB,   Rule::HeadLS};

/// "beta", "head-beta", "dB", "ls", "gc", "head-dB", "head-ls".
const char* rule_name(Rule r);
std::optional<Rule> rule_from_name(std::string_view s);

using RuleSet = std::set<Rule>;

struct ReductionStep {
  Rule rule;
  Occurrence redex;
  /// LS / HeadLS only: the rewritten variable, relative to the redex.
  std::optional<Occurrence> var_occ;

  friend bool operator==(const ReductionStep&, const ReductionStep&) = default;
};

class StaleStep : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class NotPure : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// All redexes of `rule`, in left-to-right preorder of the redex (and of the
/// variable occurrence for LS).
std::vector<ReductionStep> redexes(const Term& t, Rule rule);
/// Union over `rules`, ordered by position, then rule, then variable.
std::vector<ReductionStep> redexes(const Term& t, const RuleSet& rules);

/// Throws StaleStep when `s` is not a redex of `t`.
Term apply_step(const Term& t, const ReductionStep& s);

enum class Policy { LeftmostOutermost, LSFirst, DBFirst };

const char* policy_name(Policy p);
std::optional<Policy> policy_from_name(std::string_view s);

/// The step `policy` selects, if any.
std::optional<ReductionStep> select_redex(const Term& t, const RuleSet& rules, Policy policy);

struct TraceStep {
  ReductionStep step;
  std::uint64_t size;  // size of the term after the step
};

struct Trace {
  Term initial;
  std::vector<TraceStep> steps;
  std::map<Rule, std::uint64_t> counts;
  Term final;
  /// When false, steps keep their rule and size but not their positions.
  bool paths_recorded = true;

  std::uint64_t length() const;
  std::uint64_t count(Rule r) const;
  /// |ρ|_B: the number of dB steps.
  std::uint64_t mult_count() const;
  std::vector<Rule> labels() const;
};

class StepLimitExceeded : public std::runtime_error {
 public:
  explicit StepLimitExceeded(Trace partial);
  const Trace& trace() const { return trace_; }

 private:
  Trace trace_;
};

struct Normalized {
  Term term;
  Trace trace;
};

Normalized normalize(const Term& t, const RuleSet& rules, Policy policy, std::uint64_t max_steps,
                     bool record_paths = true);

/// Every intermediate term, starting with tr.initial. Throws StaleStep.
std::vector<Term> replay(const Trace& tr);

class UnfoldTooLarge : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr std::uint64_t kDefaultUnfoldCap = 10'000'000;

/// ↓t. The result may share subterms; its size() is the tree size.
Term unfold(const Term& t, std::uint64_t cap = kDefaultUnfoldCap);

/// The →gc-normal form.
Term gc_normalize(const Term& t);

struct LinearUnfolding {
  Term term;
  std::uint64_t steps;
};

/// The ⊸ls-normal form and the number of ⊸ls steps.
LinearUnfolding linear_unfold(const Term& t);

/// Unfoldings along a ⊸-trace: ↓t0, then one entry after each dB step.
std::vector<Term> project_trace(const Term& t0, const Trace& tr);

/// Replays a HeadBeta step of a pure term as one HeadDB step followed by
/// →s-normalization.
Normalized simulate_head(const Term& t, const ReductionStep& s);

nlohmann::ordered_json occurrence_to_json(const Occurrence& o);
Occurrence occurrence_from_json(const nlohmann::json& j);
nlohmann::ordered_json trace_to_json(const Trace& tr);
/// Parses a trace written by trace_to_json (terms re-parsed from text).
Trace trace_from_json(const nlohmann::json& j);

}  // namespace lsc
