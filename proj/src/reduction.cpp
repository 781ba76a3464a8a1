#include "lsc/reduction.hpp"

#include <algorithm>
#include <limits>
#include <unordered_map>

#include "lsc/syntax.hpp"

namespace lsc {

const char* rule_name(Rule r) {
  switch (r) {
    case Rule::Beta: return "beta";
    case Rule::HeadBeta: return "head-beta";
    case Rule::DB: return "dB";
    case Rule::LS: return "ls";
    case Rule::GC: return "gc";
    case Rule::HeadDB: return "head-dB";
    case Rule::HeadLS: return "head-ls";
  }
  return "?";
}

std::optional<Rule> rule_from_name(std::string_view s) {
  for (Rule r : kAllRules)
    if (s == rule_name(r)) return r;
  return std::nullopt;
}

const char* policy_name(Policy p) {
  switch (p) {
    case Policy::LeftmostOutermost: return "lo";
    case Policy::LSFirst: return "ls-first";
    case Policy::DBFirst: return "db-first";
  }
  return "?";
}

std::optional<Policy> policy_from_name(std::string_view s) {
  for (Policy p : {Policy::LeftmostOutermost, Policy::LSFirst, Policy::DBFirst})
    if (s == policy_name(p)) return p;
  return std::nullopt;
}

namespace {

struct Mask {
  bool beta = false, head_beta = false, db = false, ls = false, gc = false, head_db = false,
       head_ls = false;

  explicit Mask(const RuleSet& rules) {
    for (Rule r : rules) {
      switch (r) {
        case Rule::Beta: beta = true; break;
        case Rule::HeadBeta: head_beta = true; break;
        case Rule::DB: db = true; break;
        case Rule::LS: ls = true; break;
        case Rule::GC: gc = true; break;
        case Rule::HeadDB: head_db = true; break;
        case Rule::HeadLS: head_ls = true; break;
      }
    }
  }
  bool any_global() const { return beta || db || ls || gc; }
  bool any_head() const { return head_beta || head_db; }
};

bool step_less(const ReductionStep& a, const ReductionStep& b) {
  if (a.redex != b.redex) return a.redex < b.redex;
  if (a.rule != b.rule) return a.rule < b.rule;
  return a.var_occ.value_or(Occurrence{}) < b.var_occ.value_or(Occurrence{});
}

const Term& strip_subs(const Term& t) {
  const Term* c = &t;
  while (c->is_sub()) c = &c->left();
  return *c;
}

bool is_db_pattern(const Term& t) { return t.is_app() && strip_subs(t.left()).is_abs(); }
bool is_beta_pattern(const Term& t) { return t.is_app() && t.left().is_abs(); }

void free_occurrences(const Term& t, const Name& x, std::vector<Step>& at,
                      std::vector<Occurrence>& out) {
  if (!t.has_free(x)) return;
  switch (t.kind()) {
    case Kind::Var:
      out.push_back(Occurrence{at});
      return;
    case Kind::App:
      at.push_back(Step::FunOf);
      free_occurrences(t.left(), x, at, out);
      at.back() = Step::ArgOf;
      free_occurrences(t.right(), x, at, out);
      at.pop_back();
      return;
    case Kind::Abs:
      at.push_back(Step::BodyOfAbs);
      free_occurrences(t.left(), x, at, out);
      at.pop_back();
      return;
    case Kind::Sub:
      if (t.name() != x) {
        at.push_back(Step::BodyOfSub);
        free_occurrences(t.left(), x, at, out);
        at.pop_back();
      }
      at.push_back(Step::ArgOfSub);
      free_occurrences(t.right(), x, at, out);
      at.pop_back();
      return;
  }
}

// The unique ⊸ls redex: the head variable, when its innermost binder along
// the head spine is a substitution.
std::optional<ReductionStep> head_ls_redex(const Term& t) {
  struct Binder {
    Name name;
    bool is_sub;
    std::size_t depth;
  };
  std::vector<Step> path;
  std::vector<Binder> binders;
  const Term* cur = &t;
  for (;;) {
    switch (cur->kind()) {
      case Kind::Var: {
        for (auto it = binders.rbegin(); it != binders.rend(); ++it) {
          if (it->name != cur->name()) continue;
          if (!it->is_sub) return std::nullopt;
          Occurrence redex{std::vector<Step>(path.begin(), path.begin() + it->depth)};
          Occurrence var_occ{std::vector<Step>(path.begin() + it->depth, path.end())};
          return ReductionStep{Rule::HeadLS, std::move(redex), std::move(var_occ)};
        }
        return std::nullopt;
      }
      case Kind::App:
        path.push_back(Step::FunOf);
        break;
      case Kind::Abs:
        binders.push_back({cur->name(), false, path.size()});
        path.push_back(Step::BodyOfAbs);
        break;
      case Kind::Sub:
        binders.push_back({cur->name(), true, path.size()});
        path.push_back(Step::BodyOfSub);
        break;
    }
    cur = &cur->left();
  }
}

// Preorder scan for every rule except HeadLS. Stops after the first hit when
// `first_only` is set.
void scan(const Term& root, const Mask& m, bool first_only, std::vector<ReductionStep>& out) {
  struct Frame {
    const Term* t;
    std::size_t depth;
    Step step;
    bool pure_head;
    bool head;
  };
  bool global = m.any_global();
  bool head_rules = m.any_head();
  std::vector<Step> path;
  std::vector<Frame> stack{{&root, 0, Step::FunOf, true, true}};
  std::vector<Occurrence> occs;
  while (!stack.empty()) {
    Frame f = stack.back();
    stack.pop_back();
    if (f.depth > 0) {
      path.resize(f.depth - 1);
      path.push_back(f.step);
    }
    const Term& t = *f.t;
    auto emit = [&](Rule r, std::optional<Occurrence> v = std::nullopt) {
      out.push_back(ReductionStep{r, Occurrence{path}, std::move(v)});
    };
    std::size_t before = out.size();
    switch (t.kind()) {
      case Kind::Var:
        break;
      case Kind::App: {
        bool beta = is_beta_pattern(t);
        if (m.beta && beta) emit(Rule::Beta);
        if (m.head_beta && beta && f.pure_head) emit(Rule::HeadBeta);
        bool db = (m.db || m.head_db) && is_db_pattern(t);
        if (m.db && db) emit(Rule::DB);
        if (m.head_db && db && f.head) emit(Rule::HeadDB);
        break;
      }
      case Kind::Abs:
        break;
      case Kind::Sub: {
        if (!m.ls && !m.gc) break;
        bool used = t.left().has_free(t.name());
        if (m.ls && used) {
          occs.clear();
          std::vector<Step> at{Step::BodyOfSub};
          free_occurrences(t.left(), t.name(), at, occs);
          for (auto& o : occs) {
            emit(Rule::LS, std::move(o));
            if (first_only) break;
          }
        }
        if (m.gc && !used) emit(Rule::GC);
        break;
      }
    }
    if (first_only && out.size() > before) return;

    auto push = [&](const Term* c, Step s, bool ph, bool h) {
      if (global || (head_rules && (ph || h))) stack.push_back({c, f.depth + 1, s, ph, h});
    };
    switch (t.kind()) {
      case Kind::Var:
        break;
      case Kind::App:
        push(&t.right(), Step::ArgOf, false, false);
        push(&t.left(), Step::FunOf, f.pure_head, f.head);
        break;
      case Kind::Abs:
        push(&t.left(), Step::BodyOfAbs, f.pure_head, f.head);
        break;
      case Kind::Sub:
        push(&t.right(), Step::ArgOfSub, false, false);
        push(&t.left(), Step::BodyOfSub, false, f.head);
        break;
    }
  }
}

void check_pure_for(const Term& t, const Mask& m) {
  if ((m.beta || m.head_beta) && !t.is_pure())
    throw NotPure("beta reduction is defined on pure λ-terms only");
}

std::optional<ReductionStep> first_redex(const Term& t, const RuleSet& rules) {
  Mask m(rules);
  check_pure_for(t, m);
  std::vector<ReductionStep> found;
  scan(t, m, true, found);
  std::optional<ReductionStep> best;
  if (!found.empty()) best = std::move(found.front());
  if (m.head_ls) {
    auto h = head_ls_redex(t);
    if (h && (!best || step_less(*h, *best))) best = std::move(h);
  }
  return best;
}

// ---------------------------------------------------------------------------
// Contraction

Term contract_beta(const Term& redex) {
  const Term& abs = redex.left();
  return subst(abs.body(), abs.name(), redex.right());
}

Term contract_db(const Term& redex) {
  const Term& u = redex.right();
  std::vector<std::pair<Name, Term>> list;  // outermost first
  Term cur = redex.left();
  while (cur.is_sub()) {
    Name y = cur.name();
    Term body = cur.left();
    if (u.has_free(y)) {
      Name y2 = y.fresh();
      body = rename_free(body, y, y2);
      y = y2;
    }
    list.emplace_back(y, cur.right());
    cur = body;
  }
  Term out = sub(cur.body(), cur.name(), u);
  for (auto it = list.rbegin(); it != list.rend(); ++it) out = sub(std::move(out), it->first, it->second);
  return out;
}

// Sub(C[x], x, u) → Sub(C[u'], x, u) with u' a fresh copy of u; binders of C
// that would capture a free name of u are renamed.
Term contract_ls(const Term& redex, const Occurrence& var_occ) {
  Name x = redex.name();
  const Term& u = redex.right();
  Term copy = freshen_bound(u);
  std::vector<std::pair<Term, Step>> spine;
  Term cur = redex.left();
  if (u.has_free(x)) {
    Name x2 = x.fresh();
    cur = rename_free(cur, x, x2);
    x = x2;
  }
  for (std::size_t i = 1; i < var_occ.path.size(); ++i) {
    Step s = var_occ.path[i];
    if ((s == Step::BodyOfAbs || s == Step::BodyOfSub) && u.has_free(cur.name())) {
      Name y2 = cur.name().fresh();
      Term body = rename_free(cur.left(), cur.name(), y2);
      cur = s == Step::BodyOfAbs ? lam(y2, std::move(body)) : sub(std::move(body), y2, cur.right());
    }
    Term next = step_into(cur, s);
    spine.emplace_back(std::move(cur), s);
    cur = std::move(next);
  }
  Term out = std::move(copy);
  for (auto it = spine.rbegin(); it != spine.rend(); ++it) {
    const Term& p = it->first;
    switch (it->second) {
      case Step::FunOf: out = app(std::move(out), p.right()); break;
      case Step::ArgOf: out = app(p.left(), std::move(out)); break;
      case Step::BodyOfAbs: out = lam(p.name(), std::move(out)); break;
      case Step::BodyOfSub: out = sub(std::move(out), p.name(), p.right()); break;
      case Step::ArgOfSub: out = sub(p.left(), p.name(), std::move(out)); break;
    }
  }
  return sub(std::move(out), x, u);
}

Term contract(const Term& redex, const ReductionStep& s) {
  switch (s.rule) {
    case Rule::Beta:
    case Rule::HeadBeta: return contract_beta(redex);
    case Rule::DB:
    case Rule::HeadDB: return contract_db(redex);
    case Rule::LS:
    case Rule::HeadLS: return contract_ls(redex, *s.var_occ);
    case Rule::GC: return redex.left();
  }
  throw StaleStep("unknown rule");
}

Term apply_unchecked(const Term& t, const ReductionStep& s) {
  return replace_at(t, s.redex, contract(subterm_at(t, s.redex), s));
}

[[noreturn]] void stale(const ReductionStep& s, const std::string& why) {
  throw StaleStep(std::string(rule_name(s.rule)) + " step does not apply: " + why);
}

void validate(const Term& t, const ReductionStep& s) {
  if (!valid_occurrence(t, s.redex)) stale(s, "invalid redex occurrence");
  Term r = subterm_at(t, s.redex);
  bool ls = s.rule == Rule::LS || s.rule == Rule::HeadLS;
  if (ls != s.var_occ.has_value()) stale(s, "variable occurrence missing or unexpected");
  switch (s.rule) {
    case Rule::HeadBeta:
      if (!s.redex.is_pure_head_context()) stale(s, "not in a pure head context");
      [[fallthrough]];
    case Rule::Beta:
      if (!t.is_pure()) throw NotPure("beta reduction is defined on pure λ-terms only");
      if (!is_beta_pattern(r)) stale(s, "no β-redex at the position");
      return;
    case Rule::HeadDB:
      if (!s.redex.is_head_context()) stale(s, "not in a head context");
      [[fallthrough]];
    case Rule::DB:
      if (!is_db_pattern(r)) stale(s, "no dB-redex at the position");
      return;
    case Rule::GC:
      if (!r.is_sub() || r.left().has_free(r.name())) stale(s, "no gc-redex at the position");
      return;
    case Rule::LS:
    case Rule::HeadLS: {
      if (!r.is_sub()) stale(s, "no substitution at the position");
      const auto& p = s.var_occ->path;
      if (p.empty() || p.front() != Step::BodyOfSub) stale(s, "variable not in the substitution body");
      if (!valid_occurrence(r, *s.var_occ)) stale(s, "invalid variable occurrence");
      if (s.rule == Rule::HeadLS) {
        if (!s.redex.is_head_context() || !s.var_occ->is_head_context())
          stale(s, "not in a head context");
      }
      const Term* cur = &r.left();
      for (std::size_t i = 1; i < p.size(); ++i) {
        if ((p[i] == Step::BodyOfAbs || p[i] == Step::BodyOfSub) && cur->name() == r.name())
          stale(s, "variable is rebound below the substitution");
        cur = &step_into(*cur, p[i]);
      }
      if (!cur->is_var() || cur->name() != r.name()) stale(s, "occurrence is not the substituted variable");
      return;
    }
  }
}

}  // namespace

std::vector<ReductionStep> redexes(const Term& t, Rule rule) { return redexes(t, RuleSet{rule}); }

std::vector<ReductionStep> redexes(const Term& t, const RuleSet& rules) {
  Mask m(rules);
  check_pure_for(t, m);
  std::vector<ReductionStep> out;
  scan(t, m, false, out);
  if (m.head_ls) {
    if (auto h = head_ls_redex(t)) {
      auto pos = std::lower_bound(out.begin(), out.end(), *h, step_less);
      out.insert(pos, std::move(*h));
    }
  }
  return out;
}

Term apply_step(const Term& t, const ReductionStep& s) {
  validate(t, s);
  return apply_unchecked(t, s);
}

std::optional<ReductionStep> select_redex(const Term& t, const RuleSet& rules, Policy policy) {
  if (policy != Policy::LeftmostOutermost) {
    RuleSet preferred;
    for (Rule r : rules) {
      bool ls = r == Rule::LS || r == Rule::HeadLS;
      bool db = r == Rule::DB || r == Rule::HeadDB;
      if ((policy == Policy::LSFirst && ls) || (policy == Policy::DBFirst && db)) preferred.insert(r);
    }
    if (!preferred.empty() && preferred.size() < rules.size()) {
      if (auto s = first_redex(t, preferred)) return s;
    }
  }
  return first_redex(t, rules);
}

// ---------------------------------------------------------------------------
// Traces

std::uint64_t Trace::length() const { return steps.size(); }

std::uint64_t Trace::count(Rule r) const {
  auto it = counts.find(r);
  return it == counts.end() ? 0 : it->second;
}

std::uint64_t Trace::mult_count() const { return count(Rule::DB) + count(Rule::HeadDB); }

std::vector<Rule> Trace::labels() const {
  std::vector<Rule> out;
  out.reserve(steps.size());
  for (const auto& s : steps) out.push_back(s.step.rule);
  return out;
}

StepLimitExceeded::StepLimitExceeded(Trace partial)
    : std::runtime_error("step limit exceeded after " + std::to_string(partial.steps.size()) +
                         " steps"),
      trace_(std::move(partial)) {}

namespace {

// Head-spine zipper for ⊸ normalization. The term is frames_ plugged around
// a variable focus. Steps edit the frames in place instead of rebuilding the
// spine; a step that needs capture renaming goes through apply_unchecked.
class HeadZipper {
 public:
  explicit HeadZipper(const Term& t) { descend(t); }

  struct Pick {
    Rule rule;
    std::size_t depth;  // frame index of the redex
  };

  std::optional<Pick> select(Policy policy) {
    std::optional<std::size_t> ls = ls_frame();
    std::size_t limit = policy == Policy::LeftmostOutermost && ls ? *ls : frames_.size();
    std::optional<std::size_t> db = db_frame(limit);
    no_db_below_ = db ? *db : std::max(no_db_below_, limit);
    if (policy == Policy::LSFirst && ls) return Pick{Rule::HeadLS, *ls};
    if (db && (policy == Policy::DBFirst || !ls || *db < *ls)) return Pick{Rule::HeadDB, *db};
    if (ls) return Pick{Rule::HeadLS, *ls};
    return std::nullopt;
  }

  ReductionStep step_of(const Pick& p, bool paths) const {
    ReductionStep s{p.rule, {}, std::nullopt};
    if (paths) s.redex.path = steps(0, p.depth);
    if (p.rule == Rule::HeadLS) s.var_occ = Occurrence{paths ? steps(p.depth, frames_.size()) : std::vector<Step>{}};
    return s;
  }

  void apply(const Pick& p) {
    if (p.rule == Rule::HeadLS ? !apply_ls(p.depth) : !apply_db(p.depth)) {
      Term next = apply_unchecked(plug(), step_of(p, true));
      frames_.clear();
      frame_size_ = 0;
      no_db_below_ = 0;
      descend(next);
      return;
    }
    // Frames above the edit keep their status, except an application whose
    // function reaches the edit through substitutions only.
    std::size_t r = std::min(p.depth, frames_.size());
    while (r > 0 && frames_[r - 1].kind == Kind::Sub) --r;
    if (r > 0 && frames_[r - 1].kind == Kind::App) --r;
    no_db_below_ = std::min(no_db_below_, r);
  }

  Term plug() const {
    Term r = focus_;
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it) switch (it->kind) {
        case Kind::App: r = app(std::move(r), it->other); break;
        case Kind::Abs: r = lam(it->name, std::move(r)); break;
        case Kind::Sub: r = sub(std::move(r), it->name, it->other); break;
        case Kind::Var: break;
      }
    return r;
  }

  std::uint64_t size() const { return frame_size_ + focus_.size(); }

 private:
  struct Frame {
    Kind kind;
    Name name;
    Term other;
  };

  void descend(Term t) {
    while (!t.is_var()) {
      Frame f{t.kind(), t.name(), t.is_abs() ? Term{} : t.right()};
      frame_size_ += 1 + (f.other.valid() ? f.other.size() : 0);
      Term next = t.left();
      frames_.push_back(std::move(f));
      t = std::move(next);
    }
    focus_ = std::move(t);
  }

  std::vector<Step> steps(std::size_t from, std::size_t to) const {
    std::vector<Step> out;
    out.reserve(to - from);
    for (std::size_t i = from; i < to; ++i)
      out.push_back(frames_[i].kind == Kind::App   ? Step::FunOf
                    : frames_[i].kind == Kind::Abs ? Step::BodyOfAbs
                                                   : Step::BodyOfSub);
    return out;
  }

  // Innermost binder of the head variable, when it is a substitution.
  std::optional<std::size_t> ls_frame() const {
    for (std::size_t i = frames_.size(); i-- > 0;) {
      const Frame& f = frames_[i];
      if (f.kind == Kind::App || f.name != focus_.name()) continue;
      if (f.kind == Kind::Sub) return i;
      return std::nullopt;
    }
    return std::nullopt;
  }

  // Outermost application frame above `limit` whose function is λ under
  // substitutions. Frames above no_db_below_ are known not to be one.
  std::optional<std::size_t> db_frame(std::size_t limit) const {
    for (std::size_t i = no_db_below_; i < limit; ++i) {
      if (frames_[i].kind != Kind::App) continue;
      std::size_t j = i + 1;
      while (j < frames_.size() && frames_[j].kind == Kind::Sub) ++j;
      if (j < frames_.size() && frames_[j].kind == Kind::Abs) return i;
      i = j - 1;
    }
    return std::nullopt;
  }

  bool apply_ls(std::size_t s) {
    const Term u = frames_[s].other;
    if (!u.free_names().empty()) {
      if (u.has_free(frames_[s].name)) return false;
      for (std::size_t i = s + 1; i < frames_.size(); ++i)
        if (frames_[i].kind != Kind::App && u.has_free(frames_[i].name)) return false;
    }
    descend(freshen_bound(u));
    return true;
  }

  bool apply_db(std::size_t e) {
    const Term v = frames_[e].other;
    std::size_t j = e + 1;
    for (; frames_[j].kind == Kind::Sub; ++j)
      if (v.has_free(frames_[j].name)) return false;
    frames_[j].kind = Kind::Sub;
    frames_[j].other = v;
    frames_.erase(frames_.begin() + static_cast<std::ptrdiff_t>(e));
    frame_size_ -= 1;
    return true;
  }

  std::vector<Frame> frames_;
  std::uint64_t frame_size_ = 0;
  std::size_t no_db_below_ = 0;
  Term focus_;
};

Normalized normalize_linear_head(const Term& t, Policy policy, std::uint64_t max_steps, bool record_paths) {
  Trace tr;
  tr.initial = t;
  tr.paths_recorded = record_paths;
  HeadZipper z(t);
  while (auto p = z.select(policy)) {
    if (tr.steps.size() >= max_steps) {
      tr.final = z.plug();
      throw StepLimitExceeded(std::move(tr));
    }
    ReductionStep s = z.step_of(*p, record_paths);
    z.apply(*p);
    ++tr.counts[s.rule];
    tr.steps.push_back(TraceStep{std::move(s), z.size()});
  }
  tr.final = z.plug();
  return Normalized{tr.final, std::move(tr)};
}

}  // namespace

Normalized normalize(const Term& t, const RuleSet& rules, Policy policy, std::uint64_t max_steps,
                     bool record_paths) {
  if (rules == RuleSet{Rule::HeadDB, Rule::HeadLS}) return normalize_linear_head(t, policy, max_steps, record_paths);
  Trace tr;
  tr.initial = t;
  tr.paths_recorded = record_paths;
  Term cur = t;
  for (;;) {
    auto s = select_redex(cur, rules, policy);
    if (!s) break;
    if (tr.steps.size() >= max_steps) {
      tr.final = cur;
      throw StepLimitExceeded(std::move(tr));
    }
    cur = apply_unchecked(cur, *s);
    ++tr.counts[s->rule];
    if (!record_paths) {
      s->redex.path.clear();
      s->var_occ.reset();
    }
    tr.steps.push_back(TraceStep{std::move(*s), cur.size()});
  }
  tr.final = cur;
  return Normalized{cur, std::move(tr)};
}

std::vector<Term> replay(const Trace& tr) {
  if (!tr.paths_recorded) throw StaleStep("trace was recorded without positions");
  std::vector<Term> out{tr.initial};
  out.reserve(tr.steps.size() + 1);
  for (const auto& s : tr.steps) {
    out.push_back(apply_step(out.back(), s.step));
    if (out.back().size() != s.size) throw StaleStep("recorded size does not match the replay");
  }
  return out;
}

// ---------------------------------------------------------------------------
// Unfolding

namespace {

class Unfolder {
 public:
  explicit Unfolder(std::uint64_t cap) : cap_(cap) {}

  Term run(const Term& t) {
    if (t.is_pure()) return t;
    auto it = memo_.find(t.id());
    if (it != memo_.end()) return it->second;
    Term out;
    switch (t.kind()) {
      case Kind::Var:
        out = t;
        break;
      case Kind::App:
        out = app(run(t.left()), run(t.right()));
        break;
      case Kind::Abs:
        out = lam(t.name(), run(t.left()));
        break;
      case Kind::Sub: {
        Term body = run(t.left());
        if (!body.has_free(t.name())) {
          out = body;
        } else {
          Term arg = run(t.right());
          std::unordered_map<const Node*, Term> sub_memo;
          out = subst_shared(body, t.name(), arg, sub_memo);
        }
        break;
      }
    }
    if (out.size() > cap_)
      throw UnfoldTooLarge("unfolding exceeds " + std::to_string(cap_) + " nodes");
    memo_.emplace(t.id(), out);
    return out;
  }

 private:
  // Capture-avoiding substitution that visits every shared node once.
  Term subst_shared(const Term& t, const Name& x, const Term& u,
                    std::unordered_map<const Node*, Term>& memo) {
    if (!t.has_free(x)) return t;
    if (t.is_var()) return u;
    auto it = memo.find(t.id());
    if (it != memo.end()) return it->second;
    Term out;
    switch (t.kind()) {
      case Kind::Var:
        out = u;
        break;
      case Kind::App:
        out = app(subst_shared(t.left(), x, u, memo), subst_shared(t.right(), x, u, memo));
        break;
      case Kind::Abs:
        if (u.has_free(t.name())) {
          Name y2 = t.name().fresh();
          out = lam(y2, subst(rename_free(t.left(), t.name(), y2), x, u));
        } else {
          out = lam(t.name(), subst_shared(t.left(), x, u, memo));
        }
        break;
      case Kind::Sub:
        out = subst(t, x, u);
        break;
    }
    if (out.size() > cap_)
      throw UnfoldTooLarge("unfolding exceeds " + std::to_string(cap_) + " nodes");
    memo.emplace(t.id(), out);
    return out;
  }

  std::uint64_t cap_;
  std::unordered_map<const Node*, Term> memo_;
};

}  // namespace

Term unfold(const Term& t, std::uint64_t cap) { return Unfolder(cap).run(t); }

Term gc_normalize(const Term& t) {
  if (t.is_pure()) return t;
  switch (t.kind()) {
    case Kind::Var: return t;
    case Kind::App: return app(gc_normalize(t.left()), gc_normalize(t.right()));
    case Kind::Abs: return lam(t.name(), gc_normalize(t.left()));
    case Kind::Sub: {
      Term body = gc_normalize(t.left());
      if (!body.has_free(t.name())) return body;
      return sub(std::move(body), t.name(), gc_normalize(t.right()));
    }
  }
  return t;
}

LinearUnfolding linear_unfold(const Term& t) {
  auto r = normalize(t, {Rule::HeadLS}, Policy::LeftmostOutermost,
                     std::numeric_limits<std::uint64_t>::max(), false);
  return LinearUnfolding{r.term, r.trace.length()};
}

std::vector<Term> project_trace(const Term& t0, const Trace& tr) {
  if (!tr.paths_recorded) throw StaleStep("trace was recorded without positions");
  std::vector<Term> out{unfold(t0)};
  Term cur = t0;
  for (const auto& s : tr.steps) {
    if (s.step.rule != Rule::HeadDB && s.step.rule != Rule::HeadLS)
      throw std::invalid_argument(std::string("not a ⊸ step: ") + rule_name(s.step.rule));
    cur = apply_step(cur, s.step);
    if (s.step.rule == Rule::HeadDB) out.push_back(unfold(cur));
  }
  return out;
}

Normalized simulate_head(const Term& t, const ReductionStep& s) {
  if (s.rule != Rule::HeadBeta) throw std::invalid_argument("simulate_head expects a head-beta step");
  validate(t, s);
  ReductionStep db{Rule::HeadDB, s.redex, std::nullopt};
  Term mid = apply_step(t, db);
  auto rest = normalize(mid, {Rule::LS, Rule::GC}, Policy::LeftmostOutermost,
                        std::numeric_limits<std::uint64_t>::max());
  Trace tr;
  tr.initial = t;
  tr.steps.push_back(TraceStep{db, mid.size()});
  tr.counts[Rule::HeadDB] = 1;
  for (auto& st : rest.trace.steps) tr.steps.push_back(st);
  for (auto& [r, c] : rest.trace.counts) tr.counts[r] += c;
  tr.final = rest.term;
  return Normalized{rest.term, std::move(tr)};
}

// ---------------------------------------------------------------------------
// JSON

nlohmann::ordered_json occurrence_to_json(const Occurrence& o) {
  auto j = nlohmann::ordered_json::array();
  for (Step s : o.path) j.push_back(static_cast<int>(s));
  return j;
}

Occurrence occurrence_from_json(const nlohmann::json& j) {
  Occurrence o;
  for (const auto& v : j) {
    int s = v.get<int>();
    if (s < 0 || s > 4) throw std::invalid_argument("bad occurrence step " + std::to_string(s));
    o.path.push_back(static_cast<Step>(s));
  }
  return o;
}

nlohmann::ordered_json trace_to_json(const Trace& tr) {
  nlohmann::ordered_json j;
  j["initial"] = print(tr.initial);
  auto steps = nlohmann::ordered_json::array();
  for (const auto& s : tr.steps) {
    nlohmann::ordered_json e;
    e["rule"] = rule_name(s.step.rule);
    e["redex"] = tr.paths_recorded ? occurrence_to_json(s.step.redex) : nlohmann::ordered_json();
    e["var_occ"] = s.step.var_occ ? occurrence_to_json(*s.step.var_occ) : nlohmann::ordered_json();
    e["size"] = s.size;
    steps.push_back(std::move(e));
  }
  j["steps"] = std::move(steps);
  j["final"] = print(tr.final);
  nlohmann::ordered_json counts = nlohmann::ordered_json::object();
  for (const auto& [r, c] : tr.counts) counts[rule_name(r)] = c;
  j["counts"] = std::move(counts);
  return j;
}

Trace trace_from_json(const nlohmann::json& j) {
  Trace tr;
  tr.initial = parse(j.at("initial").get<std::string>());
  tr.final = parse(j.at("final").get<std::string>());
  for (const auto& e : j.at("steps")) {
    auto rule = rule_from_name(e.at("rule").get<std::string>());
    if (!rule) throw std::invalid_argument("unknown rule " + e.at("rule").dump());
    TraceStep s{ReductionStep{*rule, {}, std::nullopt}, e.at("size").get<std::uint64_t>()};
    if (e.at("redex").is_null()) {
      tr.paths_recorded = false;
    } else {
      s.step.redex = occurrence_from_json(e.at("redex"));
    }
    if (!e.at("var_occ").is_null()) s.step.var_occ = occurrence_from_json(e.at("var_occ"));
    ++tr.counts[*rule];
    tr.steps.push_back(std::move(s));
  }
  return tr;
}

}  // namespace lsc
