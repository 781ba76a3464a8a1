// Concrete syntax for terms.
//
//   term  := lam | app
//   lam   := '\' IDENT '.' term            ('λ' is accepted for '\')
//   app   := atom+                         (left-associative; a trailing lam is allowed)
//   atom  := IDENT | '(' term ')' | atom '[' IDENT '/' term ']'
//   IDENT := [a-zA-Z][a-zA-Z0-9_']* with an optional "#<digits>" tag
//
// '--' starts a comment running to the end of the line.
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

#include "lsc/term.hpp"

namespace lsc {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& msg, std::size_t line, std::size_t column);
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

Term parse(std::string_view text);

/// Minimal parenthesization; parse(print(t)) == t syntactically.
std::string print(const Term& t);

Name parse_name(std::string_view text);

}  // namespace lsc
