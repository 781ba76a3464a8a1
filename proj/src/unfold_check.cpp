#include "lsc/unfold_check.hpp"

#include <algorithm>
#include <unordered_map>

#include "lsc/reduction.hpp"
#include "lsc/syntax.hpp"

namespace lsc {

// ---------------------------------------------------------------------------
// Constraining sets and values

ConstrainingSet::ConstrainingSet(std::initializer_list<Pair> pairs)
    : ConstrainingSet(std::vector<Pair>(pairs)) {}

ConstrainingSet::ConstrainingSet(std::vector<Pair> pairs) : pairs_(std::move(pairs)) {
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

bool ConstrainingSet::contains(const Pair& p) const {
  return std::binary_search(pairs_.begin(), pairs_.end(), p);
}

bool ConstrainingSet::auto_coherent() const { return coherent(*this, *this); }

std::set<Name> ConstrainingSet::firsts() const {
  std::set<Name> out;
  for (const auto& p : pairs_) out.insert(p.first);
  return out;
}

std::set<Name> ConstrainingSet::seconds() const {
  std::set<Name> out;
  for (const auto& p : pairs_) out.insert(p.second);
  return out;
}

namespace {

/// Partners of each name on one side; nothing if some name has two partners
/// across the two sets.
bool agree_on(const std::vector<ConstrainingSet::Pair>& a, const std::vector<ConstrainingSet::Pair>& b,
              bool by_first) {
  std::unordered_map<Name, Name> partner;
  partner.reserve(a.size());
  auto key = [&](const ConstrainingSet::Pair& p) { return by_first ? p.first : p.second; };
  auto val = [&](const ConstrainingSet::Pair& p) { return by_first ? p.second : p.first; };
  for (const auto& p : a) {
    auto [it, inserted] = partner.emplace(key(p), val(p));
    if (!inserted && it->second != val(p)) return false;
  }
  for (const auto& p : b) {
    auto it = partner.find(key(p));
    if (it != partner.end() && it->second != val(p)) return false;
  }
  return true;
}

}  // namespace

bool coherent(const ConstrainingSet& a, const ConstrainingSet& b) {
  if (a.empty() || b.empty()) return true;
  if (&a == &b) return agree_on(a.pairs(), {}, true) && agree_on(a.pairs(), {}, false);
  return agree_on(a.pairs(), b.pairs(), true) && agree_on(b.pairs(), a.pairs(), true) &&
         agree_on(a.pairs(), b.pairs(), false) && agree_on(b.pairs(), a.pairs(), false);
}

Value Value::of(ConstrainingSet s) {
  Value v;
  v.set_ = std::make_shared<const ConstrainingSet>(std::move(s));
  return v;
}

bool operator==(const Value& a, const Value& b) {
  if (a.is_bottom() || b.is_bottom()) return a.is_bottom() == b.is_bottom();
  return a.set() == b.set();
}

Value combine(const Value& v, const Value& w) {
  if (v.is_bottom() || w.is_bottom()) return Value::bottom();
  if (w.set().empty()) return v;
  if (v.set().empty()) return w;
  if (!coherent(v.set(), w.set())) return Value::bottom();
  std::vector<ConstrainingSet::Pair> u;
  u.reserve(v.set().size() + w.set().size());
  std::set_union(v.set().pairs().begin(), v.set().pairs().end(), w.set().pairs().begin(),
                 w.set().pairs().end(), std::back_inserter(u));
  return Value::of(ConstrainingSet(std::move(u)));
}

std::string to_string(const Value& v) {
  if (v.is_bottom()) return "⊥";
  std::string out = "{";
  bool first = true;
  for (const auto& [x, y] : v.set().pairs()) {
    if (!first) out += ',';
    first = false;
    out += x.str() + "↦" + y.str();
  }
  return out + "}";
}

// ---------------------------------------------------------------------------
// Preprocessing

namespace {

class Renamer {
 public:
  Renamer(std::uint32_t parity, std::map<Name, Name>& free_map, std::set<Name>& subst_names)
      : next_(parity), free_map_(free_map), subst_names_(subst_names) {}

  Term run(const Term& t) {
    switch (t.kind()) {
      case Kind::Var: {
        for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
          if (it->first == t.name()) return var(it->second);
        auto [it, inserted] = free_map_.emplace(t.name(), Name());
        if (inserted) it->second = next(t.name());
        return var(it->second);
      }
      case Kind::App: {
        Term f = run(t.left());
        return app(std::move(f), run(t.right()));
      }
      case Kind::Abs: {
        Name y = next(t.name());
        scope_.emplace_back(t.name(), y);
        Term body = run(t.left());
        scope_.pop_back();
        return lam(y, std::move(body));
      }
      case Kind::Sub: {
        Name y = next(t.name());
        subst_names_.insert(y);
        scope_.emplace_back(t.name(), y);
        Term body = run(t.left());
        scope_.pop_back();
        return sub(std::move(body), y, run(t.right()));
      }
    }
    return t;
  }

  std::uint32_t max_tag() const { return next_; }

 private:
  Name next(const Name& n) {
    Name out(n.base(), next_);
    next_ += 2;
    return out;
  }

  std::uint32_t next_;
  std::map<Name, Name>& free_map_;
  std::set<Name>& subst_names_;
  std::vector<std::pair<Name, Name>> scope_;
};

}  // namespace

PreprocessedPair preprocess(const Term& a, const Term& b) {
  PreprocessedPair pp;
  Renamer ra(1, pp.rename_a, pp.subst_names);
  Renamer rb(2, pp.rename_b, pp.subst_names);
  pp.a = ra.run(gc_normalize(a));
  pp.b = rb.run(gc_normalize(b));
  reserve_tag(std::max(ra.max_tag(), rb.max_tag()));
  return pp;
}

Term relative_unfold(const Term& host, const Occurrence& occ) {
  std::vector<const Term*> subs;
  const Term* cur = &host;
  for (Step s : occ.path) {
    if (s == Step::BodyOfSub) subs.push_back(cur);
    cur = &step_into(*cur, s);
  }
  Term out = unfold(*cur);
  for (auto it = subs.rbegin(); it != subs.rend(); ++it)
    out = subst(out, (*it)->name(), unfold((*it)->right()));
  return out;
}

std::string occurrence_label(const Occurrence& o) {
  if (o.is_root()) return "root";
  std::string out;
  for (Step s : o.path) {
    if (!out.empty()) out += '.';
    out += step_name(s);
  }
  return out;
}

// ---------------------------------------------------------------------------
// The judgment rules

namespace {

constexpr std::uint32_t kNone = UINT32_MAX;

/// A term flattened in preorder. For a variable bound by a substitution,
/// `target` is the index of that substitution's argument.
struct Flat {
  std::vector<Kind> kind;
  std::vector<Name> name;
  std::vector<std::uint32_t> left, right, target, parent;
  std::vector<Step> step;  // step from the parent

  Flat(const Term& t, const std::set<Name>& subst_names) {
    std::unordered_map<Name, std::uint32_t> binding;
    struct Frame {
      const Term* t;
      std::uint32_t parent;
      Step step;
      int phase;
      std::uint32_t self;
    };
    std::vector<Frame> stack{{&t, kNone, Step::FunOf, 0, 0}};
    while (!stack.empty()) {
      Frame& f = stack.back();
      if (f.phase == 0) {
        std::uint32_t i = static_cast<std::uint32_t>(kind.size());
        f.self = i;
        kind.push_back(f.t->kind());
        name.push_back(f.t->is_app() ? Name() : f.t->name());
        left.push_back(kNone);
        right.push_back(kNone);
        target.push_back(kNone);
        parent.push_back(f.parent);
        step.push_back(f.step);
        if (f.parent != kNone) {
          bool is_left = f.step == Step::FunOf || f.step == Step::BodyOfAbs || f.step == Step::BodyOfSub;
          (is_left ? left : right)[f.parent] = i;
        }
        if (f.t->is_var()) {
          if (subst_names.count(f.t->name())) {
            auto it = binding.find(f.t->name());
            if (it == binding.end())
              throw std::invalid_argument("substituted name out of scope: " + f.t->name().str());
            target[i] = it->second;
          }
          stack.pop_back();
          continue;
        }
        f.phase = 1;
        if (f.t->is_sub()) binding[f.t->name()] = i;
        Step s = f.t->is_app() ? Step::FunOf : f.t->is_abs() ? Step::BodyOfAbs : Step::BodyOfSub;
        Frame child{&f.t->left(), i, s, 0, 0};
        stack.push_back(child);
      } else if (f.phase == 1) {
        f.phase = 2;
        if (f.t->is_abs()) {
          stack.pop_back();
          continue;
        }
        if (f.t->is_sub()) binding.erase(f.t->name());
        Step s = f.t->is_app() ? Step::ArgOf : Step::ArgOfSub;
        Frame child{&f.t->right(), f.self, s, 0, 0};
        stack.push_back(child);
      } else {
        stack.pop_back();
      }
    }
    // Substituted variables were recorded against their Sub node; retarget to
    // the argument now that it has an index.
    for (auto& tg : target)
      if (tg != kNone) tg = right[tg];
  }

  std::size_t size() const { return kind.size(); }

  Occurrence occurrence(std::uint32_t i) const {
    Occurrence o;
    for (; parent[i] != kNone; i = parent[i]) o.path.push_back(step[i]);
    std::reverse(o.path.begin(), o.path.end());
    return o;
  }

  std::uint32_t index(const Occurrence& o) const {
    std::uint32_t i = 0;
    for (Step s : o.path) {
      bool is_left = s == Step::FunOf || s == Step::BodyOfAbs || s == Step::BodyOfSub;
      std::uint32_t next = is_left ? left[i] : right[i];
      bool fits = next != kNone && step[next] == s;
      if (!fits) throw InvalidOccurrence("occurrence does not fit the term");
      i = next;
    }
    return i;
  }
};

/// Premises of a cell: one cell for a refocusing rule, two for @, one for
/// the λ rules, none for var and the error rules.
struct Premises {
  enum class Rule { Refocus, Var, App, Abs, Error } rule;
  std::pair<std::uint32_t, std::uint32_t> p[2];
  int count = 0;
};

Premises premises(const Flat& A, const Flat& B, std::uint32_t i, std::uint32_t j) {
  Premises out{Premises::Rule::Error, {}, 0};
  auto refocus = [&](std::uint32_t i2, std::uint32_t j2) {
    out.rule = Premises::Rule::Refocus;
    out.p[0] = {i2, j2};
    out.count = 1;
    return out;
  };
  if (A.kind[i] == Kind::Sub) return refocus(A.left[i], j);                   // sub_l
  if (B.kind[j] == Kind::Sub) return refocus(i, B.left[j]);                   // sub_r
  if (A.kind[i] == Kind::Var && A.target[i] != kNone) return refocus(A.target[i], j);  // unf_l
  if (B.kind[j] == Kind::Var && B.target[j] != kNone) return refocus(i, B.target[j]);  // unf_r
  Kind ka = A.kind[i], kb = B.kind[j];
  if (ka == Kind::Var && kb == Kind::Var) {
    out.rule = Premises::Rule::Var;
  } else if (ka == Kind::App && kb == Kind::App) {
    out.rule = Premises::Rule::App;
    out.p[0] = {A.left[i], B.left[j]};
    out.p[1] = {A.right[i], B.right[j]};
    out.count = 2;
  } else if (ka == Kind::Abs && kb == Kind::Abs) {
    out.rule = Premises::Rule::Abs;
    out.p[0] = {A.left[i], B.left[j]};
    out.count = 1;
  }
  return out;
}

Value conclude(const Flat& A, const Flat& B, std::uint32_t i, std::uint32_t j, const Premises& pr,
               const Value* v0, const Value* v1) {
  switch (pr.rule) {
    case Premises::Rule::Refocus:
      return *v0;
    case Premises::Rule::Var:
      return Value::of(ConstrainingSet{{A.name[i], B.name[j]}});
    case Premises::Rule::App:
      return combine(*v0, *v1);
    case Premises::Rule::Abs: {
      if (v0->is_bottom()) return Value::bottom();  // λ3
      const Name& x = A.name[i];
      const Name& y = B.name[j];
      bool has_pair = false;
      for (const auto& [p, q] : v0->set().pairs()) {
        if (p == x && q == y) {
          has_pair = true;
        } else if (p == x || q == y) {
          return Value::bottom();  // λ3
        }
      }
      if (!has_pair) return *v0;  // λ2
      std::vector<ConstrainingSet::Pair> rest;
      rest.reserve(v0->set().size() - 1);
      for (const auto& pq : v0->set().pairs())
        if (pq.first != x) rest.push_back(pq);
      return Value::of(ConstrainingSet(std::move(rest)));  // λ1
    }
    case Premises::Rule::Error:
      return Value::bottom();
  }
  return Value::bottom();
}

/// Cell storage: dense for moderate matrices, hashed otherwise.
class CellStore {
 public:
  CellStore(std::size_t rows, std::size_t cols) : cols_(cols) {
    if (rows * cols <= (std::size_t{1} << 22)) dense_.resize(rows * cols);
  }

  const Value* get(std::uint32_t i, std::uint32_t j) const {
    if (!dense_.empty()) {
      const auto& c = dense_[key(i, j)];
      return c.state == 2 ? &c.value : nullptr;
    }
    auto it = sparse_.find(key(i, j));
    return it != sparse_.end() && it->second.state == 2 ? &it->second.value : nullptr;
  }

  int state(std::uint32_t i, std::uint32_t j) const {
    if (!dense_.empty()) return dense_[key(i, j)].state;
    auto it = sparse_.find(key(i, j));
    return it == sparse_.end() ? 0 : it->second.state;
  }

  void mark(std::uint32_t i, std::uint32_t j) { cell(i, j).state = 1; }

  void set(std::uint32_t i, std::uint32_t j, Value v) {
    Cell& c = cell(i, j);
    if (c.state == 2) throw std::logic_error("cell written twice");
    c.value = std::move(v);
    c.state = 2;
    ++filled_;
  }

  std::size_t filled() const { return filled_; }

 private:
  struct Cell {
    Value value = Value::bottom();
    int state = 0;  // 0 blank, 1 in progress, 2 done
  };

  std::size_t key(std::uint32_t i, std::uint32_t j) const { return std::size_t{i} * cols_ + j; }
  Cell& cell(std::uint32_t i, std::uint32_t j) {
    return dense_.empty() ? sparse_[key(i, j)] : dense_[key(i, j)];
  }

  std::size_t cols_;
  std::vector<Cell> dense_;
  std::unordered_map<std::size_t, Cell> sparse_;
  std::size_t filled_ = 0;
};

class Checker {
 public:
  explicit Checker(const PreprocessedPair& pp)
      : A_(pp.a, pp.subst_names), B_(pp.b, pp.subst_names), store_(A_.size(), B_.size()) {}

  const Flat& A() const { return A_; }
  const Flat& B() const { return B_; }
  CellStore& store() { return store_; }

  /// Memoized evaluation with an explicit stack.
  const Value& demand(std::uint32_t i0, std::uint32_t j0) {
    if (const Value* v = store_.get(i0, j0)) return *v;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> stack{{i0, j0}};
    store_.mark(i0, j0);
    while (!stack.empty()) {
      auto [i, j] = stack.back();
      Premises pr = premises(A_, B_, i, j);
      bool ready = true;
      for (int k = 0; k < pr.count; ++k) {
        auto [pi, pj] = pr.p[k];
        int st = store_.state(pi, pj);
        if (st == 2) continue;
        if (st == 1) throw cycle(i, j, pi, pj);
        store_.mark(pi, pj);
        stack.emplace_back(pi, pj);
        ready = false;
      }
      if (!ready) continue;
      store_.set(i, j, conclude(A_, B_, i, j, pr, pr.count > 0 ? store_.get(pr.p[0].first, pr.p[0].second) : nullptr,
                                pr.count > 1 ? store_.get(pr.p[1].first, pr.p[1].second) : nullptr));
      stack.pop_back();
    }
    return *store_.get(i0, j0);
  }

  /// Kahn-style fill of every cell in premise order.
  void fill_worklist() {
    const std::size_t na = A_.size(), nb = B_.size();
    std::vector<std::uint8_t> missing(na * nb);
    std::vector<std::vector<std::uint32_t>> waiting(na * nb);
    std::vector<std::uint32_t> ready;
    for (std::uint32_t i = 0; i < na; ++i)
      for (std::uint32_t j = 0; j < nb; ++j) {
        Premises pr = premises(A_, B_, i, j);
        std::uint32_t self = static_cast<std::uint32_t>(i * nb + j);
        missing[self] = static_cast<std::uint8_t>(pr.count);
        for (int k = 0; k < pr.count; ++k) waiting[pr.p[k].first * nb + pr.p[k].second].push_back(self);
        if (pr.count == 0) ready.push_back(self);
      }
    std::size_t done = 0;
    while (!ready.empty()) {
      std::uint32_t c = ready.back();
      ready.pop_back();
      std::uint32_t i = static_cast<std::uint32_t>(c / nb), j = static_cast<std::uint32_t>(c % nb);
      Premises pr = premises(A_, B_, i, j);
      store_.set(i, j, conclude(A_, B_, i, j, pr, pr.count > 0 ? store_.get(pr.p[0].first, pr.p[0].second) : nullptr,
                                pr.count > 1 ? store_.get(pr.p[1].first, pr.p[1].second) : nullptr));
      ++done;
      for (std::uint32_t w : waiting[c])
        if (--missing[w] == 0) ready.push_back(w);
    }
    if (done != na * nb) throw DependencyCycle("worklist stalled with " + std::to_string(na * nb - done) + " blank cells");
  }

 private:
  DependencyCycle cycle(std::uint32_t i, std::uint32_t j, std::uint32_t pi, std::uint32_t pj) const {
    return DependencyCycle("cell (" + occurrence_label(A_.occurrence(i)) + ", " +
                           occurrence_label(B_.occurrence(j)) + ") depends on in-progress cell (" +
                           occurrence_label(A_.occurrence(pi)) + ", " +
                           occurrence_label(B_.occurrence(pj)) + ")");
  }

  Flat A_, B_;
  CellStore store_;
};

}  // namespace

Value judge_cell(const PreprocessedPair& pp, const Occurrence& occA, const Occurrence& occB,
                 const CellLookup& lookup) {
  Flat A(pp.a, pp.subst_names), B(pp.b, pp.subst_names);
  std::uint32_t i = A.index(occA), j = B.index(occB);
  Premises pr = premises(A, B, i, j);
  std::optional<Value> v[2];
  for (int k = 0; k < pr.count; ++k) {
    v[k] = lookup(A.occurrence(pr.p[k].first), B.occurrence(pr.p[k].second));
    if (!v[k]) throw BlankPredecessor("premise (" + occurrence_label(A.occurrence(pr.p[k].first)) + ", " +
                                      occurrence_label(B.occurrence(pr.p[k].second)) + ") is blank");
  }
  return conclude(A, B, i, j, pr, v[0] ? &*v[0] : nullptr, v[1] ? &*v[1] : nullptr);
}

// ---------------------------------------------------------------------------
// Matrix

std::optional<Value> UnfoldingMatrix::at(std::size_t row, std::size_t col) const {
  return cells_.at(row * cols_.size() + col);
}

std::optional<Value> UnfoldingMatrix::at(const Occurrence& a, const Occurrence& b) const {
  auto r = std::lower_bound(rows_.begin(), rows_.end(), a);
  auto c = std::lower_bound(cols_.begin(), cols_.end(), b);
  if (r == rows_.end() || *r != a || c == cols_.end() || *c != b)
    throw InvalidOccurrence("no such matrix cell");
  return at(static_cast<std::size_t>(r - rows_.begin()), static_cast<std::size_t>(c - cols_.begin()));
}

const Value& UnfoldingMatrix::root() const {
  const auto& c = cells_.at(0);
  if (!c) throw BlankPredecessor("root cell is blank");
  return *c;
}

void UnfoldingMatrix::write_tsv(std::ostream& os) const {
  for (const auto& c : cols_) os << '\t' << occurrence_label(c);
  os << '\n';
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    os << occurrence_label(rows_[r]);
    for (std::size_t c = 0; c < cols_.size(); ++c) {
      const auto& v = cells_[r * cols_.size() + c];
      os << '\t' << (v ? to_string(*v) : "#");
    }
    os << '\n';
  }
}

class MatrixBuilder {
 public:
  static UnfoldingMatrix build(const PreprocessedPair& pp, FillStrategy strategy) {
    Checker ch(pp);
    const auto na = static_cast<std::uint32_t>(ch.A().size());
    const auto nb = static_cast<std::uint32_t>(ch.B().size());
    if (strategy == FillStrategy::Worklist) {
      ch.fill_worklist();
    } else {
      for (std::uint32_t i = 0; i < na; ++i)
        for (std::uint32_t j = 0; j < nb; ++j) ch.demand(i, j);
    }
    UnfoldingMatrix m;
    for (std::uint32_t i = 0; i < na; ++i) m.rows_.push_back(ch.A().occurrence(i));
    for (std::uint32_t j = 0; j < nb; ++j) m.cols_.push_back(ch.B().occurrence(j));
    m.cells_.reserve(std::size_t{na} * nb);
    for (std::uint32_t i = 0; i < na; ++i)
      for (std::uint32_t j = 0; j < nb; ++j) {
        const Value* v = ch.store().get(i, j);
        m.cells_.push_back(v ? std::optional<Value>(*v) : std::nullopt);
      }
    m.filled_ = ch.store().filled();
    return m;
  }
};

UnfoldingMatrix fill_matrix(const PreprocessedPair& pp, FillStrategy strategy) {
  return MatrixBuilder::build(pp, strategy);
}

namespace {

bool identity_through(const Value& root, const PreprocessedPair& pp) {
  if (root.is_bottom()) return false;
  std::map<Name, Name> back_a, back_b;
  for (const auto& [orig, renamed] : pp.rename_a) back_a.emplace(renamed, orig);
  for (const auto& [orig, renamed] : pp.rename_b) back_b.emplace(renamed, orig);
  for (const auto& [x, y] : root.set().pairs()) {
    auto ia = back_a.find(x);
    auto ib = back_b.find(y);
    if (ia == back_a.end() || ib == back_b.end() || ia->second != ib->second) return false;
  }
  return true;
}

}  // namespace

UnfoldEqResult unfold_eq_detailed(const Term& a, const Term& b, FillStrategy strategy) {
  PreprocessedPair pp = preprocess(a, b);
  if (strategy == FillStrategy::Worklist) {
    UnfoldingMatrix m = fill_matrix(pp, strategy);
    Value root = m.root();
    return {identity_through(root, pp), root, m.filled()};
  }
  Checker ch(pp);
  Value root = ch.demand(0, 0);
  return {identity_through(root, pp), root, ch.store().filled()};
}

bool unfold_eq(const Term& a, const Term& b) { return unfold_eq_detailed(a, b).equal; }

// ---------------------------------------------------------------------------
// Oracle

namespace {

bool match(const Term& t, const Term& u, std::vector<std::pair<Name, Name>>& bound,
           std::map<Name, Name>& fwd, std::map<Name, Name>& bwd) {
  if (t.kind() != u.kind()) return false;
  switch (t.kind()) {
    case Kind::Var: {
      for (auto it = bound.rbegin(); it != bound.rend(); ++it) {
        bool l = it->first == t.name(), r = it->second == u.name();
        if (l || r) return l && r;
      }
      auto [f, fi] = fwd.emplace(t.name(), u.name());
      auto [b, bi] = bwd.emplace(u.name(), t.name());
      return f->second == u.name() && b->second == t.name();
    }
    case Kind::App:
      return match(t.left(), u.left(), bound, fwd, bwd) && match(t.right(), u.right(), bound, fwd, bwd);
    case Kind::Abs: {
      bound.emplace_back(t.name(), u.name());
      bool ok = match(t.left(), u.left(), bound, fwd, bwd);
      bound.pop_back();
      return ok;
    }
    case Kind::Sub:
      throw NotPure("unifying_renaming_oracle expects pure terms");
  }
  return false;
}

}  // namespace

std::optional<ConstrainingSet> unifying_renaming_oracle(const Term& t, const Term& u) {
  std::vector<std::pair<Name, Name>> bound;
  std::map<Name, Name> fwd, bwd;
  if (!match(t, u, bound, fwd, bwd)) return std::nullopt;
  return ConstrainingSet(std::vector<ConstrainingSet::Pair>(fwd.begin(), fwd.end()));
}

}  // namespace lsc
