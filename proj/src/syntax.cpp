#include "lsc/syntax.hpp"

#include <cctype>
#include <charconv>
#include <optional>

namespace lsc {

SyntaxError::SyntaxError(const std::string& msg, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      line_(line),
      column_(column) {}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '_' || c == '\'';
}

class Parser {
 public:
  explicit Parser(std::string_view text) : src_(text) {}

  Term parse_all() {
    Term t = term();
    skip();
    if (pos_ < src_.size()) fail("unexpected '" + std::string(1, src_[pos_]) + "'");
    return t;
  }

  Name parse_single_name() {
    skip();
    Name n = ident();
    skip();
    if (pos_ < src_.size()) fail("trailing input after name");
    return n;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < pos_ && i < src_.size(); ++i) {
      if (src_[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw SyntaxError(msg, line, col);
  }

  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        ++pos_;
      } else if (c == '-' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '-') {
        while (pos_ < src_.size() && src_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  bool at_lambda() {
    skip();
    if (pos_ < src_.size() && src_[pos_] == '\\') return true;
    return src_.substr(pos_, 2) == "\xCE\xBB";  // λ
  }

  void eat_lambda() { pos_ += src_[pos_] == '\\' ? 1 : 2; }

  bool at_atom_start() {
    skip();
    return pos_ < src_.size() && (ident_start(src_[pos_]) || src_[pos_] == '(');
  }

  void expect(char c) {
    skip();
    if (pos_ >= src_.size() || src_[pos_] != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Name ident() {
    skip();
    if (pos_ >= src_.size() || !ident_start(src_[pos_])) fail("expected identifier");
    std::size_t start = pos_;
    while (pos_ < src_.size() && ident_char(src_[pos_])) ++pos_;
    std::string_view base = src_.substr(start, pos_ - start);
    std::uint32_t tag = 0;
    if (pos_ < src_.size() && src_[pos_] == '#') {
      std::size_t digits = pos_ + 1;
      std::size_t end = digits;
      while (end < src_.size() && std::isdigit(static_cast<unsigned char>(src_[end]))) ++end;
      if (end == digits) {
        pos_ = digits;
        fail("expected digits after '#'");
      }
      auto [ptr, ec] = std::from_chars(src_.data() + digits, src_.data() + end, tag);
      if (ec != std::errc{} || tag == 0) {
        pos_ = digits;
        fail("invalid name tag");
      }
      pos_ = end;
    }
    return Name(base, tag);
  }

  Term term() {
    if (at_lambda()) return abstraction();
    return application();
  }

  Term abstraction() {
    eat_lambda();
    Name x = ident();
    expect('.');
    return lam(x, term());
  }

  Term application() {
    if (!at_atom_start()) fail("expected a term");
    Term t = atom();
    for (;;) {
      if (at_atom_start()) {
        t = app(std::move(t), atom());
      } else if (at_lambda()) {
        t = app(std::move(t), abstraction());
        return t;
      } else {
        return t;
      }
    }
  }

  Term atom() {
    skip();
    Term t;
    if (src_[pos_] == '(') {
      ++pos_;
      t = term();
      expect(')');
    } else {
      t = var(ident());
    }
    for (;;) {
      skip();
      if (pos_ >= src_.size() || src_[pos_] != '[') return t;
      ++pos_;
      Name x = ident();
      expect('/');
      Term u = term();
      expect(']');
      t = sub(std::move(t), x, std::move(u));
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
};

enum class Slot { Top, Fun, Atom };

void print_rec(const Term& t, Slot slot, std::string& out) {
  switch (t.kind()) {
    case Kind::Var:
      out += t.name().str();
      return;
    case Kind::Sub:
      print_rec(t.left(), Slot::Atom, out);
      out += '[';
      out += t.name().str();
      out += '/';
      print_rec(t.right(), Slot::Top, out);
      out += ']';
      return;
    case Kind::Abs: {
      bool parens = slot != Slot::Top;
      if (parens) out += '(';
      out += '\\';
      out += t.name().str();
      out += '.';
      print_rec(t.left(), Slot::Top, out);
      if (parens) out += ')';
      return;
    }
    case Kind::App: {
      bool parens = slot == Slot::Atom;
      if (parens) out += '(';
      print_rec(t.left(), Slot::Fun, out);
      out += ' ';
      print_rec(t.right(), Slot::Atom, out);
      if (parens) out += ')';
      return;
    }
  }
}

}  // namespace

Term parse(std::string_view text) { return Parser(text).parse_all(); }

Name parse_name(std::string_view text) { return Parser(text).parse_single_name(); }

std::string print(const Term& t) {
  std::string out;
  print_rec(t, Slot::Top, out);
  return out;
}

}  // namespace lsc
