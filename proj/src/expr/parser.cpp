#include <algorithm>
#include <cctype>
#include <climits>

#include "dirac/errors.hpp"
#include "dirac/expr.hpp"

namespace dirac::expr {

namespace {

struct Token {
  enum class Type { Int, Ident, Op, End };
  Type type;
  std::string text;
  std::size_t column;  // 1-based
};

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i;
      out.push_back({Token::Type::Int, text.substr(start, i - start), start + 1});
    } else if (std::isalpha(static_cast<unsigned char>(c))) {
      while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_')) ++i;
      out.push_back({Token::Type::Ident, text.substr(start, i - start), start + 1});
    } else if (std::string("+-*/^()").find(c) != std::string::npos) {
      out.push_back({Token::Type::Op, std::string(1, c), start + 1});
      ++i;
    } else {
      throw ParseError("unexpected character", start + 1, std::string(1, c));
    }
  }
  out.push_back({Token::Type::End, "", text.size() + 1});
  return out;
}

class Parser {
 public:
  Parser(const std::string& text, const std::vector<std::string>& coords) : toks_(tokenize(text)), coords_(coords) {}

  Expr parse() {
    Expr e = sum();
    if (peek().type != Token::Type::End) fail("unexpected token");
    return e;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const { return toks_[std::min(pos_ + ahead, toks_.size() - 1)]; }
  bool is_op(const Token& t, char c) const { return t.type == Token::Type::Op && t.text[0] == c; }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    throw ParseError(msg, t.column, t.type == Token::Type::End ? "end of input" : t.text);
  }
  void expect(char c) {
    if (!is_op(peek(), c)) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  Expr sum() {
    std::vector<Expr> terms{product()};
    while (is_op(peek(), '+') || is_op(peek(), '-')) {
      const bool minus = peek().text[0] == '-';
      ++pos_;
      Expr t = product();
      terms.push_back(minus ? Expr::make_neg(t) : t);
    }
    return terms.size() == 1 ? terms[0] : Expr::make_add(std::move(terms));
  }

  Expr product() {
    std::vector<Expr> factors{unary(true)};
    while (is_op(peek(), '*') || is_op(peek(), '/')) {
      const bool divide = peek().text[0] == '/';
      ++pos_;
      Expr f = unary(false);
      if (divide) {
        Expr num = factors.size() == 1 ? factors[0] : Expr::make_mul(std::move(factors));
        factors = {Expr::make_div(num, f)};
      } else {
        factors.push_back(f);
      }
    }
    return factors.size() == 1 ? factors[0] : Expr::make_mul(std::move(factors));
  }

  Expr unary(bool leading) {
    if (is_op(peek(), '-')) {
      ++pos_;
      return Expr::make_neg(unary(leading));
    }
    if (is_op(peek(), '+')) {
      ++pos_;
      return unary(leading);
    }
    return power(leading);
  }

  Expr power(bool leading) {
    Expr base = primary(leading);
    if (is_op(peek(), '^')) {
      ++pos_;
      return Expr::make_pow(base, exponent());
    }
    return base;
  }

  // Integer exponent, right-associative: optional sign, optional parentheses.
  int exponent() {
    if (is_op(peek(), '(')) {
      ++pos_;
      int e = exponent();
      expect(')');
      return chain(e);
    }
    int sign = 1;
    if (is_op(peek(), '-') || is_op(peek(), '+')) {
      sign = peek().text[0] == '-' ? -1 : 1;
      ++pos_;
    }
    if (peek().type != Token::Type::Int) fail("expected an integer exponent");
    const long long v = to_int(peek());
    ++pos_;
    return chain(static_cast<int>(sign * v));
  }

  int chain(int base) {
    if (!is_op(peek(), '^')) return base;
    const std::size_t col = peek().column;
    ++pos_;
    const int e = exponent();
    if (e < 0) throw ParseError("negative exponent in an exponent chain", col, "^");
    long long out = 1;
    for (int k = 0; k < e; ++k) {
      out *= base;
      if (out > INT_MAX || out < INT_MIN) throw ParseError("exponent too large", col, "^");
    }
    return static_cast<int>(out);
  }

  long long to_int(const Token& t) const {
    if (t.text.size() > 9) throw ParseError("integer exponent too large", t.column, t.text);
    return std::stoll(t.text);
  }

  Expr primary(bool leading) {
    const Token& t = peek();
    if (t.type == Token::Type::Int) {
      ++pos_;
      Scalar v(mpz_class(t.text));
      // "a/b" at the start of a product is a rational literal
      if (leading && is_op(peek(), '/') && peek(1).type == Token::Type::Int && !is_op(peek(2), '^')) {
        mpz_class den(peek(1).text);
        if (den == 0) {
          pos_ += 1;
          fail("zero denominator in a rational literal");
        }
        pos_ += 2;
        v = Scalar(v.get_num(), den);
        v.canonicalize();
      }
      return Expr(v);
    }
    if (t.type == Token::Type::Ident) {
      ++pos_;
      if (t.text == "sin" || t.text == "cos" || t.text == "exp") {
        if (!is_op(peek(), '(')) fail("expected '(' after " + t.text);
        ++pos_;
        Expr arg = sum();
        expect(')');
        const Expr::Kind k = t.text == "sin" ? Expr::Kind::Sin : t.text == "cos" ? Expr::Kind::Cos : Expr::Kind::Exp;
        return Expr::make_func(k, arg);
      }
      if (std::find(coords_.begin(), coords_.end(), t.text) == coords_.end()) throw UnknownSymbolError(t.text);
      return Expr::symbol(t.text);
    }
    if (is_op(t, '(')) {
      ++pos_;
      Expr e = sum();
      expect(')');
      return e;
    }
    fail(t.type == Token::Type::End ? "unexpected end of input" : "unexpected token");
  }

  std::vector<Token> toks_;
  const std::vector<std::string>& coords_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse_expr(const std::string& text, const std::vector<std::string>& coords) {
  return Parser(text, coords).parse();
}

}  // namespace dirac::expr
