#pragma once

// Exact symbolic scalar expressions over named chart coordinates.
//
// An Expr is an immutable tree.  Every tree has a rational-function normal
// form (see detail/ratfun.hpp); arithmetic on Exprs goes through the normal
// form, so results of computations are always normalized.  Trees produced by
// the parser keep their shape until normalized() is asked for.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dirac/detail/ratfun.hpp"

namespace dirac::expr {

class Expr {
 public:
  enum class Kind { Constant, Symbol, Neg, Add, Mul, Div, Pow, Sin, Cos, Exp };

  Expr();  // the constant 0
  Expr(const Scalar& c);  // NOLINT(google-explicit-constructor)
  Expr(int c);            // NOLINT(google-explicit-constructor)
  static Expr symbol(const std::string& name);
  static Expr from_normal(const detail::RatFun& r);

  // Raw tree constructors; no simplification beyond what the parser needs.
  static Expr make_neg(Expr a);
  static Expr make_add(std::vector<Expr> terms);
  static Expr make_mul(std::vector<Expr> factors);
  static Expr make_div(Expr num, Expr den);
  static Expr make_pow(Expr base, int exponent);
  static Expr make_func(Kind kind, Expr arg);

  Kind kind() const;
  const Scalar& value() const;        // Constant
  const std::string& name() const;    // Symbol
  int exponent() const;               // Pow
  const std::vector<Expr>& children() const;

  const detail::RatFun& normal() const;
  Expr normalized() const;

  bool is_zero() const { return normal().is_zero(); }
  bool is_constant() const { return normal().is_constant(); }
  // Only meaningful when is_constant().
  Scalar constant_value() const { return normal().constant_value(); }
  bool has_transcendental() const { return normal().has_atoms(); }
  std::set<std::string> free_symbols() const { return normal().variables(); }

  // Same normal form.
  bool equals(const Expr& o) const { return normal() == o.normal(); }

  std::string str() const;

  Expr operator-() const;
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  Expr& operator+=(const Expr& o) { return *this = *this + o; }
  Expr& operator-=(const Expr& o) { return *this = *this - o; }
  Expr& operator*=(const Expr& o) { return *this = *this * o; }
  Expr pow(int k) const;

  struct Impl;  // opaque

 private:
  explicit Expr(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
  const Impl& shape() const;
  std::shared_ptr<const Impl> impl_;
};

Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr exp(const Expr& a);

Expr differentiate(const Expr& e, const std::string& coord);

// Simultaneous substitution of coordinates by expressions.
Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl);

// Throws EvalError on a missing coordinate, a vanishing denominator, or (exact
// mode) a transcendental function.
Scalar evaluate(const Expr& e, const ExactPoint& p);
double evaluate(const Expr& e, const FloatPoint& p);

// Symbols must be among `coords`.  Throws ParseError / UnknownSymbolError.
Expr parse_expr(const std::string& text, const std::vector<std::string>& coords);

std::string to_string(const Scalar& s);

struct SampleConfig {
  int count = 16;
  std::uint64_t seed = 42;
  Scalar box = 1;
  int denom = 1024;
  double tol = 1e-9;
  int max_retries = 100;
};

// Deterministic stream of rational sample points.
class PointSampler {
 public:
  PointSampler(const SampleConfig& cfg, std::uint64_t stream = 0);
  Scalar next_scalar();
  ExactPoint next(const std::vector<std::string>& coords);

 private:
  std::uint64_t next_u64();
  std::uint64_t state_;
  Scalar box_;
  int denom_;
};

FloatPoint to_float(const ExactPoint& p);

struct ZeroVerdict {
  enum class Status { Zero, NonZero, SampledZero, Unknown };
  Status status = Status::Zero;
  std::optional<ExactPoint> witness;  // NonZero
  std::string value;                  // value at the witness, printed
  std::string note;

  // Zero or SampledZero.
  bool vanishes() const { return status == Status::Zero || status == Status::SampledZero; }
};

std::string to_string(ZeroVerdict::Status s);

ZeroVerdict classify_zero(const Expr& e, const SampleConfig& cfg = {});

}  // namespace dirac::expr
