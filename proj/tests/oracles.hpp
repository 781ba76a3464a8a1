// Independent reference implementations used by the test suites.
#pragma once

#include <map>
#include <set>
#include <optional>
#include <string>
#include <vector>

#include "lsc/term.hpp"

namespace oracle {

using lsc::Kind;
using lsc::Name;
using lsc::Term;

inline void naive_fv(const Term& t, std::vector<Name>& bound, std::set<Name>& out) {
  switch (t.kind()) {
    case Kind::Var: {
      bool b = false;
      for (const auto& n : bound) b = b || n == t.name();
      if (!b) out.insert(t.name());
      return;
    }
    case Kind::App:
      naive_fv(t.left(), bound, out);
      naive_fv(t.right(), bound, out);
      return;
    case Kind::Abs:
      bound.push_back(t.name());
      naive_fv(t.left(), bound, out);
      bound.pop_back();
      return;
    case Kind::Sub:
      naive_fv(t.right(), bound, out);
      bound.push_back(t.name());
      naive_fv(t.left(), bound, out);
      bound.pop_back();
      return;
  }
}

inline std::set<Name> fv(const Term& t) {
  std::vector<Name> bound;
  std::set<Name> out;
  naive_fv(t, bound, out);
  return out;
}

/// Nameless rendering: bound variables become their de Bruijn index.
inline void debruijn(const Term& t, std::vector<Name>& env, std::string& out) {
  switch (t.kind()) {
    case Kind::Var: {
      for (std::size_t i = env.size(); i-- > 0;)
        if (env[i] == t.name()) {
          out += "#" + std::to_string(env.size() - 1 - i);
          return;
        }
      out += t.name().str();
      return;
    }
    case Kind::App:
      out += "(";
      debruijn(t.left(), env, out);
      out += " ";
      debruijn(t.right(), env, out);
      out += ")";
      return;
    case Kind::Abs:
      out += "(L ";
      env.push_back(t.name());
      debruijn(t.left(), env, out);
      env.pop_back();
      out += ")";
      return;
    case Kind::Sub:
      out += "(S ";
      debruijn(t.right(), env, out);
      out += " ";
      env.push_back(t.name());
      debruijn(t.left(), env, out);
      env.pop_back();
      out += ")";
      return;
  }
}

inline std::string debruijn(const Term& t) {
  std::vector<Name> env;
  std::string out;
  debruijn(t, env, out);
  return out;
}

inline bool alpha_eq(const Term& a, const Term& b) { return debruijn(a) == debruijn(b); }

/// Textbook substitution that renames every binder it crosses.
inline Term subst_full(const Term& t, const Name& x, const Term& u) {
  switch (t.kind()) {
    case Kind::Var:
      return t.name() == x ? u : t;
    case Kind::App:
      return lsc::app(subst_full(t.left(), x, u), subst_full(t.right(), x, u));
    case Kind::Abs: {
      if (t.name() == x) return t;
      Name y = t.name().fresh();
      return lsc::lam(y, subst_full(subst_full(t.left(), t.name(), lsc::var(y)), x, u));
    }
    case Kind::Sub: {
      Term arg = subst_full(t.right(), x, u);
      if (t.name() == x) return lsc::sub(t.left(), x, arg);
      Name y = t.name().fresh();
      return lsc::sub(subst_full(subst_full(t.left(), t.name(), lsc::var(y)), x, u), y, arg);
    }
  }
  return t;
}

/// Unfolding by the three defining equalities with textbook substitution.
inline Term unfold(const Term& t) {
  switch (t.kind()) {
    case Kind::Var: return t;
    case Kind::App: return lsc::app(oracle::unfold(t.left()), oracle::unfold(t.right()));
    case Kind::Abs: return lsc::lam(t.name(), oracle::unfold(t.left()));
    case Kind::Sub: return subst_full(oracle::unfold(t.left()), t.name(), oracle::unfold(t.right()));
  }
  return t;
}

}  // namespace oracle
