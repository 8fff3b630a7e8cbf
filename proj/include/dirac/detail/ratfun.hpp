#pragma once

// Rational-function normal form used behind dirac::expr::Expr.
//
// A RatFun is num / den with num, den polynomials over Q in "generators"
// (chart coordinates and opaque transcendental atoms sin(u), cos(u), exp(u)),
// gcd(num, den) = 1 and den a primitive integer polynomial with a positive
// leading coefficient.  The representation is unique, so equality of normal
// forms is equality of rational functions (atoms treated as independent).

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace dirac::expr {

using Scalar = mpq_class;

using ExactPoint = std::map<std::string, Scalar>;
using FloatPoint = std::map<std::string, double>;

namespace detail {

class RatFun;

struct Generator {
  enum class Kind : std::uint8_t { Variable = 0, Sin = 1, Cos = 2, Exp = 3 };
  Kind kind;
  std::string key;  // variable name, or canonical text of the atom argument
  std::shared_ptr<const RatFun> arg;
};

// Interned; two generators are equal iff their pointers are equal.
using Gen = const Generator*;

Gen variable(const std::string& name);
// arg must not be the zero function; make_atom() folds sin 0, cos 0, exp 0.
Gen atom(Generator::Kind kind, const RatFun& arg);

bool gen_less(Gen a, Gen b);

struct Monomial {
  std::vector<std::pair<Gen, int>> powers;  // sorted by gen_less, exps > 0

  int degree() const;
  bool operator==(const Monomial& o) const { return powers == o.powers; }
};

// Graded lexicographic order; returns <0, 0, >0.
int compare(const Monomial& a, const Monomial& b);
Monomial operator*(const Monomial& a, const Monomial& b);
std::optional<Monomial> divide(const Monomial& a, const Monomial& b);

struct Term {
  Monomial mono;
  Scalar coeff;
};

class Poly {
 public:
  Poly() = default;
  explicit Poly(const Scalar& c);
  static Poly generator(Gen g);

  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Scalar constant_value() const;  // 0 if no constant term
  const std::vector<Term>& terms() const { return terms_; }
  const Term& leading() const { return terms_.front(); }
  int total_degree() const;

  Poly operator-() const;
  friend Poly operator+(const Poly& a, const Poly& b);
  friend Poly operator-(const Poly& a, const Poly& b);
  friend Poly operator*(const Poly& a, const Poly& b);
  Poly scaled(const Scalar& c) const;
  Poly times(const Monomial& m, const Scalar& c) const;

  // Exact quotient when d divides *this, nullopt otherwise.
  std::optional<Poly> divide_exact(const Poly& d) const;

  // Splits *this = content * primitive with primitive having coprime integer
  // coefficients and a positive leading coefficient.
  std::pair<Scalar, Poly> content_primitive() const;

  // gcd of all monomials (as exponent minimum)
  Monomial monomial_content() const;

  bool operator==(const Poly& o) const;
  int compare_to(const Poly& o) const;

  void collect_generators(std::set<Gen>& out) const;

 private:
  friend class PolyBuilder;
  std::vector<Term> terms_;  // strictly decreasing monomial order
};

// Accumulates terms in arbitrary order.
class PolyBuilder {
 public:
  void add(const Monomial& m, const Scalar& c);
  void add(const Poly& p);
  void add_scaled(const Poly& p, const Monomial& m, const Scalar& c);
  Poly build();

 private:
  struct Less {
    bool operator()(const Monomial& a, const Monomial& b) const { return compare(a, b) > 0; }
  };
  std::map<Monomial, Scalar, Less> acc_;
};

// gcd over Q, normalized to a primitive integer polynomial with positive
// leading coefficient (gcd(0, 0) = 0).
Poly gcd(const Poly& a, const Poly& b);

class RatFun {
 public:
  RatFun() = default;
  RatFun(const Scalar& c);  // NOLINT(google-explicit-constructor)
  explicit RatFun(Poly num);
  static RatFun generator(Gen g);
  // den != 0; reduces to lowest terms.
  static RatFun fraction(const Poly& num, const Poly& den);

  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return is_polynomial() && num_.is_constant(); }
  Scalar constant_value() const { return num_.constant_value(); }
  bool is_polynomial() const { return den_.is_constant(); }

  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }

  RatFun operator-() const;
  friend RatFun operator+(const RatFun& a, const RatFun& b);
  friend RatFun operator-(const RatFun& a, const RatFun& b);
  friend RatFun operator*(const RatFun& a, const RatFun& b);
  friend RatFun operator/(const RatFun& a, const RatFun& b);
  RatFun inverse() const;
  RatFun pow(int k) const;

  RatFun derivative(Gen var) const;
  RatFun substitute(const std::map<Gen, RatFun>& repl) const;

  bool operator==(const RatFun& o) const { return num_ == o.num_ && den_ == o.den_; }

  std::set<Gen> generators() const;
  // Chart coordinates appearing anywhere, including inside atom arguments.
  std::set<std::string> variables() const;
  bool has_atoms() const;

 private:
  Poly num_;
  Poly den_{Scalar(1)};
};

RatFun poly_derivative(const Poly& p, Gen var);
// Both throw EvalError (missing coordinate; transcendental atom in exact mode).
Scalar eval_exact(const Poly& p, const ExactPoint& pt);
double eval_float(const Poly& p, const FloatPoint& pt);
double eval_float(const RatFun& r, const FloatPoint& pt);
// Canonical printed form, defined alongside the expression printer.
std::string canonical_text(const RatFun& r);
RatFun substitute_poly(const Poly& p, const std::map<Gen, RatFun>& repl);
RatFun make_atom(Generator::Kind kind, const RatFun& arg);

}  // namespace detail
}  // namespace dirac::expr
