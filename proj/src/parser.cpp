#include "cosmo/parser.hpp"

#include <cctype>
#include <vector>

#include "cosmo/calculus.hpp"
#include "cosmo/canonical.hpp"
#include "cosmo/errors.hpp"

namespace cosmo {

namespace {

class Parser {
 public:
  explicit Parser(const std::string& text) : s_(text) {}

  Expr run() {
    Expr e = expr();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { fail_at(what, pos_); }
  [[noreturn]] void fail_at(const std::string& what, std::size_t at) const {
    throw ParseError("syntax error: " + what, at);
  }

  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(pos_ < s_.size() ? "expected '" + std::string(1, c) + "'" : "unexpected end of input");
  }

  Expr expr() {
    std::vector<Expr> terms{term()};
    for (;;) {
      if (accept('+'))
        terms.push_back(term());
      else if (accept('-'))
        terms.push_back(-term());
      else
        break;
    }
    return Expr::sum(std::move(terms));
  }

  Expr term() {
    Expr acc = unary();
    for (;;) {
      if (accept('*'))
        acc = acc * unary();
      else if (accept('/'))
        acc = acc / unary();
      else
        break;
    }
    return acc;
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = primary();
    if (!accept('^')) return base;
    Expr ex = unary();
    if (ex.is_number()) return pow(base, ex.value());
    Canonical c = Canonical::of(ex);
    if (auto q = c.constant_value()) return pow(base, *q);
    return Expr::exp(ex * Expr::log(base));
  }

  Expr number() {
    std::size_t start = pos_;
    std::string digits;
    long frac_digits = 0;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) digits += s_[pos_++];
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        digits += s_[pos_++];
        ++frac_digits;
      }
    }
    if (digits.empty()) fail_at("malformed number", start);
    long exponent = -frac_digits;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t mark = pos_++;
      int sign = 1;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) sign = s_[pos_++] == '-' ? -1 : 1;
      std::string ed;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ed += s_[pos_++];
      if (ed.empty() || ed.size() > 6) fail_at("malformed exponent", mark);
      exponent += sign * std::stol(ed);
    }
    Rational v{mpz_class(digits, 10)};
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    if (exponent < 0)
      v /= Rational(scale);
    else
      v *= Rational(scale);
    v.canonicalize();
    return Expr(v);
  }

  std::string name() {
    skip();
    std::size_t start = pos_;
    if (pos_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) {
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    }
    if (start == pos_) fail(pos_ < s_.size() ? "expected a name" : "unexpected end of input");
    return s_.substr(start, pos_ - start);
  }

  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_ || pos_ - start > 6) fail_at("expected a small integer", start);
    return std::stol(s_.substr(start, pos_ - start));
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of input");
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (!(std::isalpha(static_cast<unsigned char>(c)) || c == '_')) fail("unexpected '" + std::string(1, c) + "'");
    std::size_t at = pos_;
    std::string id = name();
    if (!accept('(')) return Expr::symbol(id);
    if (id == "diff") return diff_call();
    if (id == "fderiv") return fderiv_call();
    std::vector<Expr> args{expr()};
    while (accept(',')) args.push_back(expr());
    expect(')');
    if (args.size() != 1) fail_at("function '" + id + "' takes 1 argument, got " + std::to_string(args.size()), at);
    const Expr& a = args.front();
    if (id == "exp") return Expr::exp(a);
    if (id == "ln" || id == "log") return Expr::log(a);
    if (id == "sin") return Expr::sin(a);
    if (id == "cos") return Expr::cos(a);
    if (id == "sqrt") return Expr::sqrt(a);
    if (id == "Pi") fail_at("'Pi' is reserved", at);
    return Expr::function(id, a);
  }

  Expr diff_call() {
    Expr e = expr();
    expect(',');
    Expr var = Expr::symbol(name());
    long order = 1;
    if (accept(',')) order = integer();
    expect(')');
    if (order < 1) fail("derivative order must be positive");
    return diff(e, var, static_cast<int>(order));
  }

  Expr fderiv_call() {
    std::string f = name();
    expect(',');
    long order = integer();
    expect(',');
    Expr a = expr();
    expect(')');
    return order == 0 ? Expr::function(f, a) : Expr::derivative(f, a, static_cast<int>(order));
  }

  const std::string& s_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(const std::string& text) { return Parser(text).run(); }

}  // namespace cosmo
