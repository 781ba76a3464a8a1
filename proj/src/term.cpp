#include "lsc/term.hpp"

#include <algorithm>
#include <atomic>
#include <deque>
#include <mutex>
#include <unordered_map>

namespace lsc {

namespace {

class SymbolTable {
 public:
  SymbolTable() { intern(""); }

  std::uint32_t intern(std::string_view s) {
    std::lock_guard lock(mu_);
    auto it = ids_.find(std::string(s));
    if (it != ids_.end()) return it->second;
    auto id = static_cast<std::uint32_t>(names_.size());
    names_.emplace_back(s);
    ids_.emplace(names_.back(), id);
    return id;
  }

  std::string_view lookup(std::uint32_t id) {
    std::lock_guard lock(mu_);
    return names_.at(id);
  }

 private:
  std::mutex mu_;
  std::deque<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

SymbolTable& symbols() {
  static SymbolTable table;
  return table;
}

std::atomic<std::uint32_t> next_tag{1};

using FvPtr = std::shared_ptr<const std::vector<Name>>;

const std::vector<Name>& empty_names() {
  static const std::vector<Name> empty;
  return empty;
}

bool sorted_contains(const std::vector<Name>& v, const Name& x) {
  return std::binary_search(v.begin(), v.end(), x);
}

FvPtr fv_union(const FvPtr& a, const FvPtr& b) {
  if (!a || a == b) return b;
  if (!b) return a;
  if (std::includes(a->begin(), a->end(), b->begin(), b->end())) return a;
  if (std::includes(b->begin(), b->end(), a->begin(), a->end())) return b;
  auto out = std::make_shared<std::vector<Name>>();
  out->reserve(a->size() + b->size());
  std::set_union(a->begin(), a->end(), b->begin(), b->end(), std::back_inserter(*out));
  return out;
}

FvPtr fv_remove(const FvPtr& a, const Name& x) {
  if (!a || !sorted_contains(*a, x)) return a;
  if (a->size() == 1) return nullptr;
  auto out = std::make_shared<std::vector<Name>>();
  out->reserve(a->size() - 1);
  for (const auto& n : *a)
    if (n != x) out->push_back(n);
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Name

Name::Name(std::string_view base, std::uint32_t tag) : base_(symbols().intern(base)), tag_(tag) {
  if (tag != 0) reserve_tag(tag);
}

std::string_view Name::base() const { return symbols().lookup(base_); }

std::string Name::str() const {
  std::string s(base());
  if (tag_ != 0) {
    s += '#';
    s += std::to_string(tag_);
  }
  return s;
}

Name Name::fresh() const {
  Name n = *this;
  n.tag_ = next_tag.fetch_add(1, std::memory_order_relaxed);
  return n;
}

void reserve_tag(std::uint32_t tag) {
  std::uint32_t cur = next_tag.load(std::memory_order_relaxed);
  while (cur <= tag && !next_tag.compare_exchange_weak(cur, tag + 1, std::memory_order_relaxed)) {
  }
}

// ---------------------------------------------------------------------------
// Term

Kind Term::kind() const { return node_->kind; }
const Name& Term::name() const { return node_->name; }
const Term& Term::left() const { return node_->left; }
const Term& Term::right() const { return node_->right; }
std::uint64_t Term::size() const { return node_->size; }
std::uint64_t Term::es_count() const { return node_->es; }
bool Term::is_shallow() const { return node_->shallow; }

static const FvPtr& free_ptr(const Node* root) {
  if (root->fv_ready.load(std::memory_order_acquire)) return root->fv;
  static std::mutex stripes[64];
  std::vector<const Node*> stack{root};
  while (!stack.empty()) {
    const Node* n = stack.back();
    if (n->fv_ready.load(std::memory_order_acquire)) {
      stack.pop_back();
      continue;
    }
    const Node* l = n->left.id();
    const Node* r = n->right.id();
    bool pending = false;
    for (const Node* c : {l, r})
      if (c && !c->fv_ready.load(std::memory_order_acquire)) {
        stack.push_back(c);
        pending = true;
      }
    if (pending) continue;
    FvPtr fv;
    switch (n->kind) {
      case Kind::Var: fv = std::make_shared<std::vector<Name>>(1, n->name); break;
      case Kind::App: fv = fv_union(l->fv, r->fv); break;
      case Kind::Abs: fv = fv_remove(l->fv, n->name); break;
      case Kind::Sub: fv = fv_union(fv_remove(l->fv, n->name), r->fv); break;
    }
    std::lock_guard lock(stripes[(reinterpret_cast<std::uintptr_t>(n) >> 4) % 64]);
    if (!n->fv_ready.load(std::memory_order_relaxed)) {
      n->fv = std::move(fv);
      n->fv_ready.store(true, std::memory_order_release);
    }
    stack.pop_back();
  }
  return root->fv;
}

const std::vector<Name>& Term::free_names() const {
  const FvPtr& fv = free_ptr(node_.get());
  return fv ? *fv : empty_names();
}

bool Term::has_free(const Name& x) const {
  const FvPtr& fv = free_ptr(node_.get());
  return fv && sorted_contains(*fv, x);
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const Node& x = *a.node_;
  const Node& y = *b.node_;
  if (x.kind != y.kind || x.size != y.size || x.name != y.name) return false;
  switch (x.kind) {
    case Kind::Var:
      return true;
    case Kind::Abs:
      return x.left == y.left;
    case Kind::App:
    case Kind::Sub:
      return x.left == y.left && x.right == y.right;
  }
  return false;
}

Term var(Name x) {
  return Term(std::make_shared<const Node>(Kind::Var, x, Term{}, Term{}, 1, 0, true));
}

Term var(std::string_view x) { return var(Name(x)); }

Term app(Term f, Term a) {
  std::uint64_t size = 1 + f.size() + a.size();
  std::uint64_t es = f.es_count() + a.es_count();
  bool shallow = f.is_shallow() && a.is_shallow();
  return Term(std::make_shared<const Node>(
      Kind::App, Name{}, std::move(f), std::move(a), size, es, shallow));
}

Term lam(Name x, Term body) {
  std::uint64_t size = 1 + body.size();
  std::uint64_t es = body.es_count();
  bool shallow = body.is_shallow();
  return Term(std::make_shared<const Node>(
      Kind::Abs, x, std::move(body), Term{}, size, es, shallow));
}

Term lam(std::string_view x, Term body) { return lam(Name(x), std::move(body)); }

Term sub(Term body, Name x, Term arg) {
  std::uint64_t size = 1 + body.size() + arg.size();
  std::uint64_t es = 1 + body.es_count() + arg.es_count();
  bool shallow = body.is_shallow() && arg.is_pure();
  return Term(std::make_shared<const Node>(
      Kind::Sub, x, std::move(body), std::move(arg), size, es, shallow));
}

Term apps(Term f, const std::vector<Term>& args) {
  for (const auto& a : args) f = app(std::move(f), a);
  return f;
}

Term lams(const std::vector<Name>& xs, Term body) {
  for (auto it = xs.rbegin(); it != xs.rend(); ++it) body = lam(*it, std::move(body));
  return body;
}

// ---------------------------------------------------------------------------
// Occurrences

const char* step_name(Step s) {
  switch (s) {
    case Step::FunOf: return "fun";
    case Step::ArgOf: return "arg";
    case Step::BodyOfAbs: return "abs-body";
    case Step::BodyOfSub: return "sub-body";
    case Step::ArgOfSub: return "sub-arg";
  }
  return "?";
}

bool Occurrence::is_head_context() const {
  return std::none_of(path.begin(), path.end(),
                      [](Step s) { return s == Step::ArgOf || s == Step::ArgOfSub; });
}

bool Occurrence::is_pure_head_context() const {
  return std::all_of(path.begin(), path.end(),
                     [](Step s) { return s == Step::FunOf || s == Step::BodyOfAbs; });
}

std::size_t Occurrence::box_depth() const {
  return static_cast<std::size_t>(std::count_if(
      path.begin(), path.end(), [](Step s) { return s == Step::ArgOf || s == Step::ArgOfSub; }));
}

Occurrence Occurrence::child(Step s) const {
  Occurrence o = *this;
  o.path.push_back(s);
  return o;
}

Occurrence Occurrence::concat(const Occurrence& rest) const {
  Occurrence o = *this;
  o.path.insert(o.path.end(), rest.path.begin(), rest.path.end());
  return o;
}

bool step_matches(const Term& t, Step s) {
  switch (s) {
    case Step::FunOf:
    case Step::ArgOf: return t.is_app();
    case Step::BodyOfAbs: return t.is_abs();
    case Step::BodyOfSub:
    case Step::ArgOfSub: return t.is_sub();
  }
  return false;
}

const Term& step_into(const Term& t, Step s) {
  if (!step_matches(t, s))
    throw InvalidOccurrence(std::string("step '") + step_name(s) + "' does not fit the node");
  return (s == Step::ArgOf || s == Step::ArgOfSub) ? t.right() : t.left();
}

Term subterm_at(const Term& host, const Occurrence& occ) {
  const Term* cur = &host;
  for (Step s : occ.path) cur = &step_into(*cur, s);
  return *cur;
}

bool valid_occurrence(const Term& host, const Occurrence& occ) {
  const Term* cur = &host;
  for (Step s : occ.path) {
    if (!step_matches(*cur, s)) return false;
    cur = (s == Step::ArgOf || s == Step::ArgOfSub) ? &cur->right() : &cur->left();
  }
  return true;
}

namespace {

Term rebuild(const Term& parent, Step s, Term child) {
  switch (s) {
    case Step::FunOf: return app(std::move(child), parent.right());
    case Step::ArgOf: return app(parent.left(), std::move(child));
    case Step::BodyOfAbs: return lam(parent.name(), std::move(child));
    case Step::BodyOfSub: return sub(std::move(child), parent.name(), parent.right());
    case Step::ArgOfSub: return sub(parent.left(), parent.name(), std::move(child));
  }
  throw InvalidOccurrence("bad step");
}

}  // namespace

Term replace_at(const Term& host, const Occurrence& occ, const Term& replacement) {
  std::vector<const Term*> spine;
  spine.reserve(occ.path.size());
  const Term* cur = &host;
  for (Step s : occ.path) {
    spine.push_back(cur);
    cur = &step_into(*cur, s);
  }
  Term out = replacement;
  for (std::size_t i = occ.path.size(); i-- > 0;) out = rebuild(*spine[i], occ.path[i], std::move(out));
  return out;
}

// ---------------------------------------------------------------------------
// Binding

NameSet fv(const Term& t) {
  const auto& names = t.free_names();
  return NameSet(names.begin(), names.end());
}

namespace {

Term subst_rec(const Term& t, const Name& x, const Term& u) {
  if (!t.has_free(x)) return t;
  switch (t.kind()) {
    case Kind::Var:
      return u;
    case Kind::App:
      return app(subst_rec(t.left(), x, u), subst_rec(t.right(), x, u));
    case Kind::Abs: {
      const Name& y = t.name();
      if (u.has_free(y)) {
        Name y2 = y.fresh();
        return lam(y2, subst_rec(rename_free(t.left(), y, y2), x, u));
      }
      return lam(y, subst_rec(t.left(), x, u));
    }
    case Kind::Sub: {
      const Name& y = t.name();
      Term arg = subst_rec(t.right(), x, u);
      if (y == x || !t.left().has_free(x)) return sub(t.left(), y, std::move(arg));
      if (u.has_free(y)) {
        Name y2 = y.fresh();
        return sub(subst_rec(rename_free(t.left(), y, y2), x, u), y2, std::move(arg));
      }
      return sub(subst_rec(t.left(), x, u), y, std::move(arg));
    }
  }
  return t;
}

}  // namespace

Term subst(const Term& t, const Name& x, const Term& u) { return subst_rec(t, x, u); }

Term rename_free(const Term& t, const Name& x, const Name& y) {
  if (x == y) return t;
  return subst_rec(t, x, var(y));
}

namespace {

using Renaming = std::vector<std::pair<Name, Name>>;

Term freshen_rec(const Term& t, Renaming& env) {
  switch (t.kind()) {
    case Kind::Var:
      for (auto it = env.rbegin(); it != env.rend(); ++it)
        if (it->first == t.name()) return var(it->second);
      return t;
    case Kind::App: {
      Term f = freshen_rec(t.left(), env);
      return app(std::move(f), freshen_rec(t.right(), env));
    }
    case Kind::Abs: {
      Name y = t.name().fresh();
      env.emplace_back(t.name(), y);
      Term body = freshen_rec(t.left(), env);
      env.pop_back();
      return lam(y, std::move(body));
    }
    case Kind::Sub: {
      Name y = t.name().fresh();
      env.emplace_back(t.name(), y);
      Term body = freshen_rec(t.left(), env);
      env.pop_back();
      return sub(std::move(body), y, freshen_rec(t.right(), env));
    }
  }
  return t;
}

}  // namespace

Term freshen_bound(const Term& t) {
  Renaming env;
  return freshen_rec(t, env);
}

Term deep_copy(const Term& t) {
  switch (t.kind()) {
    case Kind::Var: return var(t.name());
    case Kind::App: return app(deep_copy(t.left()), deep_copy(t.right()));
    case Kind::Abs: return lam(t.name(), deep_copy(t.left()));
    case Kind::Sub: return sub(deep_copy(t.left()), t.name(), deep_copy(t.right()));
  }
  return t;
}

namespace {

// Index of the innermost binder named x (0 = innermost), or -1 when free.
long binder_index(const std::vector<Name>& env, const Name& x) {
  for (std::size_t i = env.size(); i-- > 0;)
    if (env[i] == x) return static_cast<long>(env.size() - 1 - i);
  return -1;
}

bool alpha_rec(const Term& a, const Term& b, std::vector<Name>& ea, std::vector<Name>& eb) {
  if (a.kind() != b.kind() || a.size() != b.size()) return false;
  if (a.id() == b.id()) {
    const auto& names = a.free_names();
    if (std::all_of(names.begin(), names.end(), [&](const Name& x) {
          return binder_index(ea, x) == binder_index(eb, x);
        }))
      return true;
  }
  switch (a.kind()) {
    case Kind::Var: {
      long ia = binder_index(ea, a.name());
      long ib = binder_index(eb, b.name());
      if (ia != ib) return false;
      return ia >= 0 || a.name() == b.name();
    }
    case Kind::App:
      return alpha_rec(a.left(), b.left(), ea, eb) && alpha_rec(a.right(), b.right(), ea, eb);
    case Kind::Abs: {
      ea.push_back(a.name());
      eb.push_back(b.name());
      bool ok = alpha_rec(a.left(), b.left(), ea, eb);
      ea.pop_back();
      eb.pop_back();
      return ok;
    }
    case Kind::Sub: {
      if (!alpha_rec(a.right(), b.right(), ea, eb)) return false;
      ea.push_back(a.name());
      eb.push_back(b.name());
      bool ok = alpha_rec(a.left(), b.left(), ea, eb);
      ea.pop_back();
      eb.pop_back();
      return ok;
    }
  }
  return false;
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

std::size_t alpha_hash_rec(const Term& t, std::vector<Name>& env) {
  switch (t.kind()) {
    case Kind::Var: {
      long i = binder_index(env, t.name());
      return i >= 0 ? mix(11, static_cast<std::size_t>(i)) : mix(13, NameHash{}(t.name()));
    }
    case Kind::App:
      return mix(mix(17, alpha_hash_rec(t.left(), env)), alpha_hash_rec(t.right(), env));
    case Kind::Abs: {
      env.push_back(t.name());
      std::size_t h = mix(19, alpha_hash_rec(t.left(), env));
      env.pop_back();
      return h;
    }
    case Kind::Sub: {
      std::size_t ha = alpha_hash_rec(t.right(), env);
      env.push_back(t.name());
      std::size_t h = mix(mix(23, alpha_hash_rec(t.left(), env)), ha);
      env.pop_back();
      return h;
    }
  }
  return 0;
}

void collect_boxes(const Term& t, Occurrence& at, std::vector<std::pair<Occurrence, Term>>& out) {
  switch (t.kind()) {
    case Kind::Var:
      return;
    case Kind::Abs:
      at.path.push_back(Step::BodyOfAbs);
      collect_boxes(t.left(), at, out);
      at.path.pop_back();
      return;
    case Kind::App:
    case Kind::Sub: {
      Step l = t.is_app() ? Step::FunOf : Step::BodyOfSub;
      Step r = t.is_app() ? Step::ArgOf : Step::ArgOfSub;
      at.path.push_back(l);
      collect_boxes(t.left(), at, out);
      at.path.back() = r;
      out.emplace_back(at, t.right());
      collect_boxes(t.right(), at, out);
      at.path.pop_back();
      return;
    }
  }
}

}  // namespace

bool alpha_eq(const Term& a, const Term& b) {
  std::vector<Name> ea, eb;
  return alpha_rec(a, b, ea, eb);
}

std::size_t alpha_hash(const Term& t) {
  std::vector<Name> env;
  return alpha_hash_rec(t, env);
}

std::vector<std::pair<Occurrence, Term>> box_subterms(const Term& t) {
  std::vector<std::pair<Occurrence, Term>> out;
  Occurrence at;
  collect_boxes(t, at, out);
  return out;
}

bool is_shallow(const Term& t) { return t.is_shallow(); }

std::uint64_t es_count(const Term& t) { return t.es_count(); }

}  // namespace lsc
