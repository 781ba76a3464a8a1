// Terms of the λ-calculus and of the linear-substitution calculus Λ[·].
//
// A Term is an immutable, reference-counted tree. Nodes cache their size,
// their number of explicit substitutions, shallowness and their free-variable
// set, so the common queries are O(1) and substitution can skip subterms that
// do not mention the substituted name.
#pragma once

#include <atomic>

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lsc {

/// A variable name: an interned base identifier plus a freshness tag.
/// Tag 0 is reserved for names written by the user.
class Name {
 public:
  Name() = default;
  explicit Name(std::string_view base, std::uint32_t tag = 0);

  std::string_view base() const;
  std::uint32_t tag() const { return tag_; }
  std::uint32_t base_id() const { return base_; }

  /// `base` for tag 0, `base#tag` otherwise.
  std::string str() const;

  /// Same base, globally unused tag.
  Name fresh() const;

  friend bool operator==(const Name&, const Name&) = default;
  friend auto operator<=>(const Name&, const Name&) = default;

 private:
  std::uint32_t base_ = 0;
  std::uint32_t tag_ = 0;
};

/// Makes sure future calls to Name::fresh never produce `tag`.
void reserve_tag(std::uint32_t tag);

struct NameHash {
  std::size_t operator()(const Name& n) const noexcept {
    return (static_cast<std::size_t>(n.base_id()) << 32) ^ n.tag();
  }
};

using NameSet = std::set<Name>;

enum class Kind : std::uint8_t { Var, App, Abs, Sub };

struct Node;

class Term {
 public:
  Term() = default;

  Kind kind() const;
  bool is_var() const { return kind() == Kind::Var; }
  bool is_app() const { return kind() == Kind::App; }
  bool is_abs() const { return kind() == Kind::Abs; }
  bool is_sub() const { return kind() == Kind::Sub; }

  /// Variable name, or the binder of an abstraction / substitution.
  const Name& name() const;
  const Name& binder() const { return name(); }

  // App(fun = left, arg = right), Abs(body = left), Sub(body = left, arg = right)
  const Term& left() const;
  const Term& right() const;
  const Term& fun() const { return left(); }
  const Term& body() const { return left(); }
  const Term& arg() const { return right(); }

  std::uint64_t size() const;
  std::uint64_t es_count() const;
  bool is_pure() const { return es_count() == 0; }
  bool is_shallow() const;

  /// Sorted free names.
  const std::vector<Name>& free_names() const;
  bool has_free(const Name& x) const;

  bool valid() const { return static_cast<bool>(node_); }
  const Node* id() const { return node_.get(); }

  /// Syntactic equality (names compared exactly).
  friend bool operator==(const Term& a, const Term& b);

 private:
  friend Term var(Name);
  friend Term app(Term, Term);
  friend Term lam(Name, Term);
  friend Term sub(Term, Name, Term);
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}

  std::shared_ptr<const Node> node_;
};

struct Node {
  Kind kind;
  Name name;
  Term left;
  Term right;
  std::uint64_t size;
  std::uint64_t es;
  bool shallow;
  // Free names, computed on first use.
  mutable std::shared_ptr<const std::vector<Name>> fv;
  mutable std::atomic<bool> fv_ready{false};

  Node(Kind k, Name n, Term l, Term r, std::uint64_t sz, std::uint64_t e, bool sh)
      : kind(k), name(n), left(std::move(l)), right(std::move(r)), size(sz), es(e), shallow(sh) {}
};

Term var(Name x);
Term var(std::string_view x);
Term app(Term f, Term a);
Term lam(Name x, Term body);
Term lam(std::string_view x, Term body);
/// body[x/arg]
Term sub(Term body, Name x, Term arg);

/// Left-nested application f a1 ... an.
Term apps(Term f, const std::vector<Term>& args);
/// λx1...λxn.body
Term lams(const std::vector<Name>& xs, Term body);

// ---------------------------------------------------------------------------
// Occurrences

enum class Step : std::uint8_t { FunOf = 0, ArgOf = 1, BodyOfAbs = 2, BodyOfSub = 3, ArgOfSub = 4 };

const char* step_name(Step s);

/// A root-to-subterm path. The path is the context C, the subterm reached is
/// the focus t, with C[t] equal to the host.
struct Occurrence {
  std::vector<Step> path;

  bool is_root() const { return path.empty(); }
  /// No ArgOf / ArgOfSub step (head contexts H).
  bool is_head_context() const;
  /// Only FunOf / BodyOfAbs steps (pure head contexts).
  bool is_pure_head_context() const;
  /// Number of ArgOf / ArgOfSub steps.
  std::size_t box_depth() const;

  Occurrence child(Step s) const;
  Occurrence concat(const Occurrence& rest) const;

  friend bool operator==(const Occurrence&, const Occurrence&) = default;
  /// Left-to-right preorder.
  friend auto operator<=>(const Occurrence&, const Occurrence&) = default;
};

class InvalidOccurrence : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

bool step_matches(const Term& t, Step s);
const Term& step_into(const Term& t, Step s);

/// The subterm at `occ`; throws InvalidOccurrence when a step does not fit.
Term subterm_at(const Term& host, const Occurrence& occ);
bool valid_occurrence(const Term& host, const Occurrence& occ);
/// C[replacement] where C is the context described by `occ` (no renaming).
Term replace_at(const Term& host, const Occurrence& occ, const Term& replacement);

// ---------------------------------------------------------------------------
// Binding

NameSet fv(const Term& t);

/// Capture-avoiding t{x/u}. Binders of t are renamed only where capture
/// would otherwise occur.
Term subst(const Term& t, const Name& x, const Term& u);

/// Renames every free occurrence of x to y, assuming y is not captured.
Term rename_free(const Term& t, const Name& x, const Name& y);

/// α-equivalent copy in which every binder carries a fresh tag.
Term freshen_bound(const Term& t);

/// Tree copy with no shared nodes.
Term deep_copy(const Term& t);

/// α-equivalence; free names must coincide exactly.
bool alpha_eq(const Term& a, const Term& b);

/// All occurrences entered through an ArgOf / ArgOfSub step, with their focus,
/// in left-to-right preorder.
std::vector<std::pair<Occurrence, Term>> box_subterms(const Term& t);

bool is_shallow(const Term& t);
std::uint64_t es_count(const Term& t);

/// Hash that respects α-equivalence (binders hashed by de Bruijn index).
std::size_t alpha_hash(const Term& t);

}  // namespace lsc

template <>
struct std::hash<lsc::Name> {
  std::size_t operator()(const lsc::Name& n) const noexcept { return lsc::NameHash{}(n); }
};
