// Hereditary head variables, the head measure of shallow terms, and
// statistics of ⊸-traces.
#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>

#include "json.hpp"
#include "lsc/reduction.hpp"
#include "lsc/term.hpp"

namespace lsc {

class NotShallow : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Follows the head variable of t; whenever it is bound by a substitution,
/// continues with the head variable of that substitution's argument. Returns
/// the free variable the chain ends on, or nothing if it ends on a
/// λ-bound variable.
std::optional<Name> hh_variable(const Term& t);

/// t = HH[x] for a hereditary head context HH that does not capture x.
bool is_hh_occurrence(const Term& t, const Name& x);

/// |t|_hh. Throws NotShallow.
std::uint64_t head_measure(const Term& t);

struct TraceStats {
  std::uint64_t total = 0;
  std::uint64_t mult = 0;
  std::uint64_t expo = 0;
  std::uint64_t phases = 0;
  bool quadratic_ok = true;
};

/// Counts dB steps as multiplicative and ls steps as exponential; gc steps
/// are not ⊸ steps and are skipped. β steps are rejected.
TraceStats trace_stats(const Trace& tr);

nlohmann::ordered_json stats_to_json(const TraceStats& s);

}  // namespace lsc
