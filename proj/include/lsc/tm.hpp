// Scott encodings of symbols, strings and Turing-machine configurations, the
// λ-terms simulating a machine under head reduction, a direct simulator, and
// the harness running encoded machines on both reduction engines.
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "lsc/measure.hpp"
#include "lsc/term.hpp"

namespace lsc {

/// An ordered alphabet; each character is one symbol.
using Alphabet = std::string;

enum class Move { L, R, S };

struct Transition {
  std::string state;
  char write;
  Move move;
};

class InvalidMachine : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TMachine {
  Alphabet sigma;
  char blank = '_';
  std::vector<std::string> states;
  std::string initial;
  std::string final_state;
  std::map<std::pair<std::string, char>, Transition> delta;

  /// Throws InvalidMachine. δ must be defined exactly on the non-final states.
  void validate() const;
  std::size_t state_index(const std::string& q) const;  // 1-based
  std::size_t symbol_index(char a) const;               // 1-based

  static TMachine from_json(const nlohmann::json& j);
  nlohmann::ordered_json to_json() const;
};

struct TMConfig {
  std::string left_reversed;  // nearest cell first
  char head;
  std::string right;
  std::string state;
};

class NotAScottString : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class DecodeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class MachineStepLimit : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// λx1...λxn.x_i, 1 ≤ i ≤ n.
Term encode_element(std::size_t i, std::size_t n);
Term encode_symbol(char a, const Alphabet& sigma);
Term encode_string(std::string_view s, const Alphabet& sigma);
/// Inverse of encode_string up to α; the term must have the exact shape.
std::string decode_string(const Term& t, const Alphabet& sigma);
/// λx.x ⌈u^r⌉ ⌈a⌉ ⌈v⌉ ⌈q⌉.
Term encode_config(const TMConfig& c, const TMachine& m);

/// H = T T with T = λx.λy.y (x x y); H u →h² u (H u).
Term fixpoint_H();

/// AC(Σ): AC k ⌈a⌉ ⌈u⌉ →h^(|Σ|+5) k ⌈a u⌉.
Term append_char_term(const Alphabet& sigma);

/// CS(Σ,Δ): CS k ⌈u⌉_Σ →h k ⌈u without the symbols outside Δ⌉_Δ.
Term convert_string_term(const Alphabet& from, const Alphabet& to);

/// The characters of u that belong to delta.
std::string forget(std::string_view u, const Alphabet& delta);

/// I(M,Δ): I k ⌈u⌉_Δ →h k ⌈(ε, blank, u, q_init)⌉.
Term init_term(const TMachine& m, const Alphabet& delta);
/// F(M,Δ): F k ⌈(u, a, v, q)⌉ →h k ⌈v⌉_Δ.
Term final_term(const TMachine& m, const Alphabet& delta);
/// T(M): T k ⌈C⌉ →h k ⌈D⌉ for the final configuration D reached from C.
Term transition_term(const TMachine& m);

/// U(M,Δ) = λu.I(λx.T(λy.F(λw.w) y) x) u. Rejects Δ containing the blank.
Term machine_term(const TMachine& m, const Alphabet& delta);

struct MachineRun {
  TMConfig final_config;
  /// Number of δ applications.
  std::uint64_t steps;
};

/// Direct simulation from (ε, blank, u, q_init). Throws MachineStepLimit.
MachineRun tm_run(const TMachine& m, std::string_view u, std::uint64_t max_steps);

enum class Engine { HeadBeta, LinearHead };

struct EncodedRun {
  std::string output;
  /// →h steps, or all ⊸ steps for the linear engine.
  std::uint64_t steps = 0;
  std::optional<TraceStats> stats;
  std::uint64_t machine_steps = 0;
  Term result;
};

/// Normalizes U(M,Δ)⌈u⌉ with the chosen engine and checks the result against
/// tm_run: by decoding for HeadBeta, by unfold_eq for LinearHead. Throws
/// DecodeMismatch, StepLimitExceeded or MachineStepLimit.
EncodedRun run_encoded(const TMachine& m, const Alphabet& delta, std::string_view u, Engine engine,
                       std::uint64_t max_steps);

}  // namespace lsc
