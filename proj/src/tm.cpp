#include "lsc/tm.hpp"

#include <algorithm>
#include <set>

#include "lsc/reduction.hpp"
#include "lsc/unfold_check.hpp"

namespace lsc {

namespace {

Term v(const char* x) { return var(x); }
Term l(std::initializer_list<const char*> xs, Term body) {
  std::vector<Name> names;
  for (const char* x : xs) names.emplace_back(x);
  return lams(names, std::move(body));
}
Term a(Term f, std::initializer_list<Term> args) { return apps(std::move(f), std::vector<Term>(args)); }

std::vector<Name> selector_names(std::size_t n) {
  std::vector<Name> xs;
  for (std::size_t i = 1; i <= n; ++i) xs.emplace_back("x" + std::to_string(i));
  return xs;
}

std::size_t index_in(const Alphabet& sigma, char c) {
  auto p = sigma.find(c);
  if (p == Alphabet::npos) throw std::invalid_argument(std::string("symbol '") + c + "' not in alphabet");
  return p + 1;
}

}  // namespace

// ---------------------------------------------------------------------------
// Machines

void TMachine::validate() const {
  if (sigma.empty()) throw InvalidMachine("empty alphabet");
  if (std::set<char>(sigma.begin(), sigma.end()).size() != sigma.size())
    throw InvalidMachine("repeated alphabet symbol");
  if (sigma.find(blank) == Alphabet::npos) throw InvalidMachine("blank not in the alphabet");
  if (std::set<std::string>(states.begin(), states.end()).size() != states.size())
    throw InvalidMachine("repeated state");
  auto has_state = [&](const std::string& q) { return std::find(states.begin(), states.end(), q) != states.end(); };
  if (!has_state(initial)) throw InvalidMachine("unknown initial state " + initial);
  if (!has_state(final_state)) throw InvalidMachine("unknown final state " + final_state);
  for (const auto& [key, tr] : delta) {
    if (!has_state(key.first) || !has_state(tr.state)) throw InvalidMachine("transition on unknown state");
    if (sigma.find(key.second) == Alphabet::npos || sigma.find(tr.write) == Alphabet::npos)
      throw InvalidMachine("transition on unknown symbol");
  }
  for (const auto& q : states)
    for (char c : sigma) {
      bool defined = delta.count({q, c}) > 0;
      if (defined == (q == final_state))
        throw InvalidMachine("δ(" + q + "," + std::string(1, c) + ") must be " +
                             (defined ? "undefined" : "defined"));
    }
}

std::size_t TMachine::state_index(const std::string& q) const {
  auto it = std::find(states.begin(), states.end(), q);
  if (it == states.end()) throw InvalidMachine("unknown state " + q);
  return static_cast<std::size_t>(it - states.begin()) + 1;
}

std::size_t TMachine::symbol_index(char c) const { return index_in(sigma, c); }

namespace {

char symbol_from_json(const nlohmann::json& j) {
  auto s = j.get<std::string>();
  if (s.size() != 1) throw InvalidMachine("symbols must be single characters: \"" + s + "\"");
  return s[0];
}

Move move_from_json(const nlohmann::json& j) {
  auto s = j.get<std::string>();
  if (s == "L") return Move::L;
  if (s == "R") return Move::R;
  if (s == "S") return Move::S;
  throw InvalidMachine("move must be L, R or S: \"" + s + "\"");
}

const char* move_name(Move m) {
  switch (m) {
    case Move::L: return "L";
    case Move::R: return "R";
    case Move::S: return "S";
  }
  return "?";
}

}  // namespace

TMachine TMachine::from_json(const nlohmann::json& j) {
  TMachine m;
  try {
    for (const auto& s : j.at("sigma")) m.sigma += symbol_from_json(s);
    m.blank = symbol_from_json(j.at("blank"));
    m.states = j.at("states").get<std::vector<std::string>>();
    m.initial = j.at("initial").get<std::string>();
    m.final_state = j.at("final").get<std::string>();
    for (const auto& d : j.at("delta")) {
      const auto& from = d.at("from");
      const auto& to = d.at("to");
      auto key = std::make_pair(from.at(0).get<std::string>(), symbol_from_json(from.at(1)));
      Transition tr{to.at(0).get<std::string>(), symbol_from_json(to.at(1)), move_from_json(to.at(2))};
      if (!m.delta.emplace(key, tr).second)
        throw InvalidMachine("duplicate transition for (" + key.first + "," + std::string(1, key.second) + ")");
    }
  } catch (const nlohmann::json::exception& e) {
    throw InvalidMachine(std::string("malformed machine description: ") + e.what());
  }
  m.validate();
  return m;
}

nlohmann::ordered_json TMachine::to_json() const {
  nlohmann::ordered_json j;
  j["sigma"] = nlohmann::ordered_json::array();
  for (char c : sigma) j["sigma"].push_back(std::string(1, c));
  j["blank"] = std::string(1, blank);
  j["states"] = states;
  j["initial"] = initial;
  j["final"] = final_state;
  j["delta"] = nlohmann::ordered_json::array();
  for (const auto& [key, tr] : delta)
    j["delta"].push_back({{"from", {key.first, std::string(1, key.second)}},
                          {"to", {tr.state, std::string(1, tr.write), move_name(tr.move)}}});
  return j;
}

// ---------------------------------------------------------------------------
// Encodings

Term encode_element(std::size_t i, std::size_t n) {
  if (i < 1 || i > n) throw std::out_of_range("element index out of range");
  auto xs = selector_names(n);
  return lams(xs, var(xs[i - 1]));
}

Term encode_symbol(char c, const Alphabet& sigma) { return encode_element(index_in(sigma, c), sigma.size()); }

Term encode_string(std::string_view s, const Alphabet& sigma) {
  auto xs = selector_names(sigma.size());
  xs.emplace_back("y");
  Term out = lams(xs, var("y"));
  for (auto it = s.rbegin(); it != s.rend(); ++it)
    out = lams(xs, app(var(xs[index_in(sigma, *it) - 1]), std::move(out)));
  return out;
}

std::string decode_string(const Term& t, const Alphabet& sigma) {
  const std::size_t n = sigma.size();
  std::string out;
  Term cur = t;
  std::vector<Name> binders;
  for (;;) {
    binders.clear();
    for (std::size_t k = 0; k <= n; ++k) {
      if (!cur.is_abs()) throw NotAScottString("expected " + std::to_string(n + 1) + " abstractions");
      binders.push_back(cur.name());
      cur = cur.body();
    }
    auto resolve = [&](const Name& x) -> std::size_t {
      for (std::size_t k = binders.size(); k-- > 0;)
        if (binders[k] == x) return k;
      throw NotAScottString("free variable " + x.str() + " in head position");
    };
    if (cur.is_var()) {
      if (resolve(cur.name()) != n) throw NotAScottString("empty string must return its last argument");
      return out;
    }
    if (!cur.is_app() || !cur.fun().is_var()) throw NotAScottString("expected x_i applied to a string");
    std::size_t k = resolve(cur.fun().name());
    if (k == n) throw NotAScottString("a symbol selector cannot be the last binder");
    out += sigma[k];
    cur = cur.arg();
  }
}

Term encode_config(const TMConfig& c, const TMachine& m) {
  return l({"x"}, a(v("x"), {encode_string(c.left_reversed, m.sigma), encode_symbol(c.head, m.sigma),
                              encode_string(c.right, m.sigma),
                              encode_element(m.state_index(c.state), m.states.size())}));
}

// ---------------------------------------------------------------------------
// Combinators

Term fixpoint_H() {
  Term t = l({"x", "y"}, app(v("y"), a(v("x"), {v("x"), v("y")})));
  return app(t, t);
}

Term append_char_term(const Alphabet& sigma) {
  const std::size_t n = sigma.size();
  auto xs = selector_names(n);
  std::vector<Term> args;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Name> inner = xs;
    inner.emplace_back("w");
    Term cons = lams(inner, app(var(xs[i]), v("u")));
    args.push_back(l({"u", "y"}, app(v("y"), cons)));
  }
  args.push_back(v("u"));
  args.push_back(v("y"));
  return l({"y", "a", "u"}, apps(v("a"), args));
}

std::string forget(std::string_view u, const Alphabet& delta) {
  std::string out;
  for (char c : u)
    if (delta.find(c) != Alphabet::npos) out += c;
  return out;
}

// The recursion is a direct self-application W W rather than H W: the base
// case then costs exactly |Σ|+5 head steps.
Term convert_string_term(const Alphabet& from, const Alphabet& to) {
  Term ac = append_char_term(to);
  Term rec = app(v("x"), v("x"));
  std::vector<Term> args;
  for (char c : from) {
    Term k = to.find(c) != Alphabet::npos ? l({"u2"}, a(ac, {v("z"), encode_symbol(c, to), v("u2")}))
                                          : l({"u2"}, app(v("z"), v("u2")));
    args.push_back(l({"u", "z"}, a(rec, {k, v("u")})));
  }
  args.push_back(l({"z"}, app(v("z"), encode_string("", to))));
  args.push_back(v("z"));
  Term w = l({"x", "z", "u"}, apps(v("u"), args));
  return app(w, w);
}

Term init_term(const TMachine& m, const Alphabet& delta) {
  Term config = l({"y"}, a(v("y"), {encode_string("", m.sigma), encode_symbol(m.blank, m.sigma), v("z"),
                                    encode_element(m.state_index(m.initial), m.states.size())}));
  return l({"x", "u"}, a(convert_string_term(delta, m.sigma), {l({"z"}, app(v("x"), config)), v("u")}));
}

Term final_term(const TMachine& m, const Alphabet& delta) {
  return l({"x", "y"},
           app(v("y"), l({"v", "a", "u", "q"}, a(convert_string_term(m.sigma, delta), {v("x"), v("u")}))));
}

Term transition_term(const TMachine& m) {
  const std::size_t nq = m.states.size();
  Term ac = append_char_term(m.sigma);
  auto sym = [&](char c) { return encode_symbol(c, m.sigma); };
  auto state = [&](const std::string& q) { return encode_element(m.state_index(q), nq); };
  Term eps = encode_string("", m.sigma);
  // x z (λx.x left head right q)
  auto next = [&](Term left, Term head, Term right, const std::string& q) {
    return a(v("x"), {v("z"), l({"x"}, a(v("x"), {std::move(left), std::move(head), std::move(right), state(q)}))});
  };

  std::vector<Term> ms;
  for (const auto& qi : m.states) {
    std::vector<Term> ns;
    for (char aj : m.sigma) {
      if (qi == m.final_state) {
        ns.push_back(l({"u", "v", "z"},
                       app(v("z"), l({"x"}, a(v("x"), {v("u"), sym(aj), v("v"), state(qi)})))));
        continue;
      }
      const Transition& tr = m.delta.at({qi, aj});
      Term ak = sym(tr.write);
      const std::string& ql = tr.state;
      switch (tr.move) {
        case Move::S:
          ns.push_back(l({"u", "v", "z"}, next(v("u"), ak, v("v"), ql)));
          break;
        case Move::L: {
          std::vector<Term> ps;
          for (char ai : m.sigma)
            ps.push_back(l({"u", "v", "z"}, a(ac, {l({"w"}, next(v("u"), sym(ai), v("w"), ql)), ak, v("v")})));
          ps.push_back(l({"v", "z"}, a(ac, {l({"w"}, next(eps, sym(m.blank), v("w"), ql)), ak, v("v")})));
          ps.push_back(v("v"));
          ps.push_back(v("z"));
          ns.push_back(l({"u", "v", "z"}, apps(v("u"), ps)));
          break;
        }
        case Move::R: {
          std::vector<Term> rs;
          for (char ai : m.sigma)
            rs.push_back(l({"v", "u", "z"}, a(ac, {l({"w"}, next(v("w"), sym(ai), v("v"), ql)), ak, v("u")})));
          rs.push_back(l({"u", "z"}, a(ac, {l({"w"}, next(v("w"), sym(m.blank), eps, ql)), ak, v("u")})));
          rs.push_back(v("u"));
          rs.push_back(v("z"));
          ns.push_back(l({"u", "v", "z"}, apps(v("v"), rs)));
          break;
        }
      }
    }
    ns.push_back(v("u"));
    ns.push_back(v("v"));
    ns.push_back(v("z"));
    ms.push_back(l({"u", "a", "v", "z"}, apps(v("a"), ns)));
  }
  ms.push_back(v("u"));
  ms.push_back(v("a"));
  ms.push_back(v("v"));
  ms.push_back(v("z"));
  Term g = l({"x", "z", "y"}, app(v("y"), l({"u", "a", "v", "q"}, apps(v("q"), ms))));
  return app(fixpoint_H(), g);
}

Term machine_term(const TMachine& m, const Alphabet& delta) {
  m.validate();
  if (delta.find(m.blank) != Alphabet::npos) throw InvalidMachine("Δ must not contain the blank");
  for (char c : delta)
    if (m.sigma.find(c) == Alphabet::npos) throw InvalidMachine(std::string("Δ symbol '") + c + "' not in Σ");
  Term f = l({"y"}, a(final_term(m, delta), {l({"w"}, v("w")), v("y")}));
  Term k = l({"x"}, a(transition_term(m), {f, v("x")}));
  return l({"u"}, a(init_term(m, delta), {k, v("u")}));
}

// ---------------------------------------------------------------------------
// Running

MachineRun tm_run(const TMachine& m, std::string_view u, std::uint64_t max_steps) {
  TMConfig c{"", m.blank, std::string(u), m.initial};
  for (char ch : u)
    if (ch == m.blank || m.sigma.find(ch) == Alphabet::npos)
      throw std::invalid_argument(std::string("input symbol '") + ch + "' is the blank or not in Σ");
  std::uint64_t steps = 0;
  while (c.state != m.final_state) {
    if (steps >= max_steps) throw MachineStepLimit("machine did not halt within " + std::to_string(max_steps) + " steps");
    const Transition& tr = m.delta.at({c.state, c.head});
    c.state = tr.state;
    switch (tr.move) {
      case Move::S:
        c.head = tr.write;
        break;
      case Move::L:
        c.right.insert(c.right.begin(), tr.write);
        if (c.left_reversed.empty()) {
          c.head = m.blank;
        } else {
          c.head = c.left_reversed.front();
          c.left_reversed.erase(0, 1);
        }
        break;
      case Move::R:
        c.left_reversed.insert(c.left_reversed.begin(), tr.write);
        if (c.right.empty()) {
          c.head = m.blank;
        } else {
          c.head = c.right.front();
          c.right.erase(0, 1);
        }
        break;
    }
    ++steps;
  }
  return {c, steps};
}

EncodedRun run_encoded(const TMachine& m, const Alphabet& delta, std::string_view u, Engine engine,
                       std::uint64_t max_steps) {
  MachineRun oracle = tm_run(m, u, max_steps);
  std::string expected = forget(oracle.final_config.right, delta);
  Term start = app(machine_term(m, delta), encode_string(u, delta));
  EncodedRun out;
  out.machine_steps = oracle.steps;
  if (engine == Engine::HeadBeta) {
    auto r = normalize(start, {Rule::HeadBeta}, Policy::LeftmostOutermost, max_steps, false);
    out.steps = r.trace.length();
    out.result = r.term;
    try {
      out.output = decode_string(r.term, delta);
    } catch (const NotAScottString& e) {
      throw DecodeMismatch(std::string("head normal form is not a string: ") + e.what());
    }
    if (out.output != expected)
      throw DecodeMismatch("encoded run produced \"" + out.output + "\", machine produced \"" + expected + "\"");
  } else {
    auto r = normalize(start, {Rule::HeadDB, Rule::HeadLS}, Policy::LeftmostOutermost, max_steps, false);
    out.steps = r.trace.length();
    out.stats = trace_stats(r.trace);
    out.result = r.term;
    if (!unfold_eq(r.term, encode_string(expected, delta)))
      throw DecodeMismatch("linear head normal form does not unfold to ⌈" + expected + "⌉");
    out.output = expected;
  }
  return out;
}

}  // namespace lsc
