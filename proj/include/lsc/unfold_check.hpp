// Deciding α-equality of unfoldings without computing them.
//
// Both terms are preprocessed so that every binder and every free variable
// has a distinct name. The checker then fills a matrix indexed by pairs of
// positions, one in each term, with unfolding judgments: ⊥ when the relative
// unfoldings at the two positions differ, or the set of name pairs that
// renames one into the other. The cell at the two roots decides the query.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lsc/term.hpp"

namespace lsc {

/// A finite set of name pairs, kept sorted and duplicate-free.
class ConstrainingSet {
 public:
  using Pair = std::pair<Name, Name>;

  ConstrainingSet() = default;
  ConstrainingSet(std::initializer_list<Pair> pairs);
  explicit ConstrainingSet(std::vector<Pair> pairs);

  const std::vector<Pair>& pairs() const { return pairs_; }
  std::size_t size() const { return pairs_.size(); }
  bool empty() const { return pairs_.empty(); }
  bool contains(const Pair& p) const;
  /// The graph of a bijection.
  bool auto_coherent() const;
  std::set<Name> firsts() const;
  std::set<Name> seconds() const;

  friend bool operator==(const ConstrainingSet&, const ConstrainingSet&) = default;

 private:
  std::vector<Pair> pairs_;
};

bool coherent(const ConstrainingSet& a, const ConstrainingSet& b);

/// ⊥ or a constraining set. Copies share the underlying set.
class Value {
 public:
  static Value bottom() { return Value(); }
  static Value of(ConstrainingSet s);

  bool is_bottom() const { return !set_; }
  /// Precondition: !is_bottom().
  const ConstrainingSet& set() const { return *set_; }

  friend bool operator==(const Value& a, const Value& b);

 private:
  Value() = default;
  std::shared_ptr<const ConstrainingSet> set_;
};

Value combine(const Value& v, const Value& w);

/// "⊥" or "{x↦y,...}".
std::string to_string(const Value& v);

struct PreprocessedPair {
  Term a;
  Term b;
  /// Binders of substitutions in either term.
  std::set<Name> subst_names;
  /// Original free name → name used in a (resp. b).
  std::map<Name, Name> rename_a;
  std::map<Name, Name> rename_b;
};

/// gc-normalizes both terms and renames every binder and free variable so
/// that the names of a and b are pairwise distinct. Names of a get odd tags
/// and names of b even tags, assigned in preorder.
PreprocessedPair preprocess(const Term& a, const Term& b);

/// ↓_C t for the context C described by `occ`: the enclosing substitutions,
/// innermost first, applied to ↓t.
Term relative_unfold(const Term& host, const Occurrence& occ);

/// The judgment cell is read before all its premises are available.
class BlankPredecessor : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// The premise relation contains a cycle.
class DependencyCycle : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Returns the value of a premise cell, or nothing if it is still blank.
using CellLookup = std::function<std::optional<Value>(const Occurrence&, const Occurrence&)>;

/// Applies the unique unfolding rule for the foci at occA in pp.a and occB in
/// pp.b. Throws BlankPredecessor if a premise is blank.
Value judge_cell(const PreprocessedPair& pp, const Occurrence& occA, const Occurrence& occB,
                 const CellLookup& lookup);

enum class FillStrategy {
  /// Memoized recursion from each cell on demand.
  Memo,
  /// Repeatedly fill blank cells whose premises are all filled.
  Worklist,
};

class UnfoldingMatrix {
 public:
  /// Positions of pp.a / pp.b in preorder.
  const std::vector<Occurrence>& rows() const { return rows_; }
  const std::vector<Occurrence>& cols() const { return cols_; }
  /// Nothing for a blank cell.
  std::optional<Value> at(std::size_t row, std::size_t col) const;
  std::optional<Value> at(const Occurrence& a, const Occurrence& b) const;
  const Value& root() const;
  std::size_t filled() const { return filled_; }

  /// Header row of column occurrences, then one row per row occurrence.
  void write_tsv(std::ostream& os) const;

 private:
  friend class MatrixBuilder;
  std::vector<Occurrence> rows_, cols_;
  std::vector<std::optional<Value>> cells_;
  std::size_t filled_ = 0;
};

/// Fills every cell.
UnfoldingMatrix fill_matrix(const PreprocessedPair& pp, FillStrategy strategy = FillStrategy::Memo);

struct UnfoldEqResult {
  bool equal;
  Value root;
  std::uint64_t cells_filled;
};

/// alpha_eq(unfold(a), unfold(b)), computed on the compact terms.
UnfoldEqResult unfold_eq_detailed(const Term& a, const Term& b,
                                  FillStrategy strategy = FillStrategy::Memo);
bool unfold_eq(const Term& a, const Term& b);

/// "root" or the step names joined by '.'.
std::string occurrence_label(const Occurrence& o);

/// The bijection σ between the free names of two pure terms with tσ = u up
/// to α, by direct structural matching.
std::optional<ConstrainingSet> unifying_renaming_oracle(const Term& t, const Term& u);

}  // namespace lsc
