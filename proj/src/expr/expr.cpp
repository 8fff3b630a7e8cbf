#include "dirac/expr.hpp"

#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>

#include "dirac/errors.hpp"

namespace dirac::expr {

using detail::Gen;
using detail::Generator;
using detail::Poly;
using detail::RatFun;

struct Expr::Impl {
  Kind kind = Kind::Constant;
  Scalar value = 0;
  std::string name;
  int exponent = 0;
  std::vector<Expr> children;

  // Set at construction for computed values; the tree is then built on demand.
  bool computed = false;
  mutable std::once_flag nf_once;
  mutable std::optional<RatFun> nf;
  mutable std::once_flag tree_once;
  mutable std::shared_ptr<const Impl> tree;
};

namespace {

Expr tree_of(const RatFun& r);

RatFun normal_of_tree(const Expr& e) {
  const auto& ch = e.children();
  switch (e.kind()) {
    case Expr::Kind::Constant:
      return RatFun(e.value());
    case Expr::Kind::Symbol:
      return RatFun::generator(detail::variable(e.name()));
    case Expr::Kind::Neg:
      return -ch[0].normal();
    case Expr::Kind::Add: {
      RatFun out;
      for (const auto& c : ch) out = out + c.normal();
      return out;
    }
    case Expr::Kind::Mul: {
      RatFun out(Scalar(1));
      for (const auto& c : ch) out = out * c.normal();
      return out;
    }
    case Expr::Kind::Div:
      if (ch[1].normal().is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "division by an expression that is identically zero");
      return ch[0].normal() / ch[1].normal();
    case Expr::Kind::Pow:
      if (e.exponent() < 0 && ch[0].normal().is_zero()) {
        throw EvalError(EvalError::Kind::DivisionByZero, "negative power of an expression that is identically zero");
      }
      return ch[0].normal().pow(e.exponent());
    case Expr::Kind::Sin:
      return detail::make_atom(Generator::Kind::Sin, ch[0].normal());
    case Expr::Kind::Cos:
      return detail::make_atom(Generator::Kind::Cos, ch[0].normal());
    case Expr::Kind::Exp:
      return detail::make_atom(Generator::Kind::Exp, ch[0].normal());
  }
  return {};
}

Expr gen_tree(Gen g) {
  switch (g->kind) {
    case Generator::Kind::Variable:
      return Expr::symbol(g->key);
    case Generator::Kind::Sin:
      return Expr::make_func(Expr::Kind::Sin, tree_of(*g->arg));
    case Generator::Kind::Cos:
      return Expr::make_func(Expr::Kind::Cos, tree_of(*g->arg));
    case Generator::Kind::Exp:
      return Expr::make_func(Expr::Kind::Exp, tree_of(*g->arg));
  }
  return {};
}

Expr mono_tree(const detail::Monomial& m) {
  std::vector<Expr> factors;
  for (const auto& [g, e] : m.powers) factors.push_back(e == 1 ? gen_tree(g) : Expr::make_pow(gen_tree(g), e));
  if (factors.empty()) return Expr(1);
  if (factors.size() == 1) return factors[0];
  return Expr::make_mul(std::move(factors));
}

Expr poly_tree(const Poly& p) {
  if (p.is_zero()) return Expr(0);
  std::vector<Expr> terms;
  for (const auto& t : p.terms()) {
    const Scalar mag = abs(t.coeff);
    Expr body;
    if (t.mono.powers.empty()) {
      body = Expr(mag);
    } else if (mag == 1) {
      body = mono_tree(t.mono);
    } else {
      Expr m = mono_tree(t.mono);
      std::vector<Expr> factors{Expr(mag)};
      if (m.kind() == Expr::Kind::Mul) {
        factors.insert(factors.end(), m.children().begin(), m.children().end());
      } else {
        factors.push_back(m);
      }
      body = Expr::make_mul(std::move(factors));
    }
    terms.push_back(t.coeff < 0 ? Expr::make_neg(body) : body);
  }
  if (terms.size() == 1) return terms[0];
  return Expr::make_add(std::move(terms));
}

Expr tree_of(const RatFun& r) {
  Expr num = poly_tree(r.numerator());
  if (r.is_polynomial()) return num;
  return Expr::make_div(num, poly_tree(r.denominator()));
}

// ---------------------------------------------------------------- printing

enum Prec { kSum = 1, kProduct = 2, kUnary = 3, kPower = 4, kAtom = 5 };

int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Constant:
      if (e.value() < 0) return kUnary;
      return e.value().get_den() == 1 ? kAtom : kProduct;
    case Expr::Kind::Symbol:
    case Expr::Kind::Sin:
    case Expr::Kind::Cos:
    case Expr::Kind::Exp:
      return kAtom;
    case Expr::Kind::Neg:
      return kUnary;
    case Expr::Kind::Add:
      return kSum;
    case Expr::Kind::Mul:
    case Expr::Kind::Div:
      return kProduct;
    case Expr::Kind::Pow:
      return kPower;
  }
  return kAtom;
}

void print(const Expr& e, std::ostream& os);

void print_wrapped(const Expr& e, bool parens, std::ostream& os) {
  if (parens) os << '(';
  print(e, os);
  if (parens) os << ')';
}

void print(const Expr& e, std::ostream& os) {
  const auto& ch = e.children();
  switch (e.kind()) {
    case Expr::Kind::Constant:
      os << to_string(e.value());
      return;
    case Expr::Kind::Symbol:
      os << e.name();
      return;
    case Expr::Kind::Neg:
      os << '-';
      print_wrapped(ch[0], precedence(ch[0]) <= kSum || precedence(ch[0]) == kUnary, os);
      return;
    case Expr::Kind::Add:
      for (std::size_t i = 0; i < ch.size(); ++i) {
        const Expr& c = ch[i];
        if (i == 0) {
          print(c, os);
        } else if (c.kind() == Expr::Kind::Neg) {
          os << " - ";
          print_wrapped(c.children()[0], precedence(c.children()[0]) <= kSum, os);
        } else if (c.kind() == Expr::Kind::Constant && c.value() < 0) {
          os << " - " << to_string(Scalar(-c.value()));
        } else {
          os << " + ";
          print_wrapped(c, precedence(c) <= kSum, os);
        }
      }
      return;
    case Expr::Kind::Mul:
      for (std::size_t i = 0; i < ch.size(); ++i) {
        if (i > 0) os << '*';
        const int p = precedence(ch[i]);
        print_wrapped(ch[i], p <= kSum || (i > 0 && p == kUnary) || (i > 0 && p == kProduct), os);
      }
      return;
    case Expr::Kind::Div:
      print_wrapped(ch[0], precedence(ch[0]) <= kSum, os);
      os << '/';
      print_wrapped(ch[1], precedence(ch[1]) <= kUnary, os);
      return;
    case Expr::Kind::Pow:
      print_wrapped(ch[0], precedence(ch[0]) < kAtom, os);
      if (e.exponent() < 0) {
        os << "^(" << e.exponent() << ')';
      } else {
        os << '^' << e.exponent();
      }
      return;
    case Expr::Kind::Sin:
    case Expr::Kind::Cos:
    case Expr::Kind::Exp:
      os << (e.kind() == Expr::Kind::Sin ? "sin(" : e.kind() == Expr::Kind::Cos ? "cos(" : "exp(");
      print(ch[0], os);
      os << ')';
      return;
  }
}

}  // namespace

}  // namespace dirac::expr

namespace dirac::expr::detail {

std::string canonical_text(const RatFun& r) { return tree_of(r).str(); }

}  // namespace dirac::expr::detail

namespace dirac::expr {

// ---------------------------------------------------------------- Expr

Expr::Expr() : Expr(Scalar(0)) {}

Expr::Expr(int c) : Expr(Scalar(c)) {}

Expr::Expr(const Scalar& c) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Constant;
  impl->value = c;
  impl_ = std::move(impl);
}

Expr Expr::symbol(const std::string& name) {
  auto impl = std::make_shared<Impl>();
  impl->kind = Kind::Symbol;
  impl->name = name;
  return Expr(std::shared_ptr<const Impl>(std::move(impl)));
}

Expr Expr::from_normal(const RatFun& r) {
  auto impl = std::make_shared<Impl>();
  impl->computed = true;
  impl->nf = r;
  std::call_once(impl->nf_once, [] {});
  return Expr(std::shared_ptr<const Impl>(std::move(impl)));
}

namespace {

std::shared_ptr<Expr::Impl> node(Expr::Kind kind, std::vector<Expr> children) {
  auto impl = std::make_shared<Expr::Impl>();
  impl->kind = kind;
  impl->children = std::move(children);
  return impl;
}

}  // namespace

Expr Expr::make_neg(Expr a) { return Expr(node(Kind::Neg, {std::move(a)})); }

Expr Expr::make_add(std::vector<Expr> terms) { return Expr(node(Kind::Add, std::move(terms))); }

Expr Expr::make_mul(std::vector<Expr> factors) { return Expr(node(Kind::Mul, std::move(factors))); }

Expr Expr::make_div(Expr num, Expr den) { return Expr(node(Kind::Div, {std::move(num), std::move(den)})); }

Expr Expr::make_pow(Expr base, int exponent) {
  auto impl = node(Kind::Pow, {std::move(base)});
  impl->exponent = exponent;
  return Expr(std::shared_ptr<const Impl>(std::move(impl)));
}

Expr Expr::make_func(Kind kind, Expr arg) { return Expr(node(kind, {std::move(arg)})); }

const Expr::Impl& Expr::shape() const {
  const Impl& impl = *impl_;
  if (!impl.computed) return impl;
  std::call_once(impl.tree_once, [&impl] { impl.tree = tree_of(*impl.nf).impl_; });
  return *impl.tree;
}

Expr::Kind Expr::kind() const { return shape().kind; }
const Scalar& Expr::value() const { return shape().value; }
const std::string& Expr::name() const { return shape().name; }
int Expr::exponent() const { return shape().exponent; }
const std::vector<Expr>& Expr::children() const { return shape().children; }

const RatFun& Expr::normal() const {
  const Impl& impl = *impl_;
  std::call_once(impl.nf_once, [this, &impl] { impl.nf = normal_of_tree(*this); });
  return *impl.nf;
}

Expr Expr::normalized() const { return from_normal(normal()); }

std::string Expr::str() const {
  std::ostringstream os;
  print(*this, os);
  return os.str();
}

Expr Expr::operator-() const { return from_normal(-normal()); }
Expr operator+(const Expr& a, const Expr& b) { return Expr::from_normal(a.normal() + b.normal()); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::from_normal(a.normal() - b.normal()); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::from_normal(a.normal() * b.normal()); }

Expr operator/(const Expr& a, const Expr& b) {
  if (b.is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "division by an expression that is identically zero");
  return Expr::from_normal(a.normal() / b.normal());
}

Expr Expr::pow(int k) const {
  if (k < 0 && is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "negative power of zero");
  return from_normal(normal().pow(k));
}

Expr sin(const Expr& a) { return Expr::from_normal(detail::make_atom(Generator::Kind::Sin, a.normal())); }
Expr cos(const Expr& a) { return Expr::from_normal(detail::make_atom(Generator::Kind::Cos, a.normal())); }
Expr exp(const Expr& a) { return Expr::from_normal(detail::make_atom(Generator::Kind::Exp, a.normal())); }

Expr differentiate(const Expr& e, const std::string& coord) {
  return Expr::from_normal(e.normal().derivative(detail::variable(coord)));
}

Expr substitute(const Expr& e, const std::map<std::string, Expr>& repl) {
  std::map<Gen, RatFun> table;
  for (const auto& [name, value] : repl) table.emplace(detail::variable(name), value.normal());
  return Expr::from_normal(e.normal().substitute(table));
}

Scalar evaluate(const Expr& e, const ExactPoint& p) {
  const RatFun& r = e.normal();
  if (r.has_atoms()) throw EvalError(EvalError::Kind::Transcendental, "exact evaluation of sin/cos/exp");
  const Scalar den = detail::eval_exact(r.denominator(), p);
  if (den == 0) throw EvalError(EvalError::Kind::DivisionByZero, "division by zero at the evaluation point");
  return detail::eval_exact(r.numerator(), p) / den;
}

double evaluate(const Expr& e, const FloatPoint& p) { return detail::eval_float(e.normal(), p); }

std::string to_string(const Scalar& s) { return s.get_str(); }

// ---------------------------------------------------------------- sampling

PointSampler::PointSampler(const SampleConfig& cfg, std::uint64_t stream)
    : state_(cfg.seed ^ (stream * 0xD1B54A32D192ED03ULL)), box_(cfg.box), denom_(cfg.denom) {
  if (denom_ < 1) denom_ = 1;
}

std::uint64_t PointSampler::next_u64() {
  // splitmix64
  std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30U)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27U)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31U);
}

Scalar PointSampler::next_scalar() {
  const std::uint64_t d = 1 + next_u64() % static_cast<std::uint64_t>(denom_);
  const Scalar scaled = box_ * Scalar(static_cast<unsigned long>(d));
  const mpz_class bound = scaled.get_num() / scaled.get_den();
  const std::uint64_t span = 2 * bound.get_ui() + 1;
  const long n = static_cast<long>(next_u64() % span) - static_cast<long>(bound.get_ui());
  Scalar out(n, static_cast<unsigned long>(d));
  out.canonicalize();
  return out;
}

ExactPoint PointSampler::next(const std::vector<std::string>& coords) {
  ExactPoint p;
  for (const auto& c : coords) p[c] = next_scalar();
  return p;
}

FloatPoint to_float(const ExactPoint& p) {
  FloatPoint out;
  for (const auto& [k, v] : p) out[k] = v.get_d();
  return out;
}

std::string to_string(ZeroVerdict::Status s) {
  switch (s) {
    case ZeroVerdict::Status::Zero:
      return "zero";
    case ZeroVerdict::Status::NonZero:
      return "nonzero";
    case ZeroVerdict::Status::SampledZero:
      return "sampled-zero";
    case ZeroVerdict::Status::Unknown:
      return "unknown";
  }
  return "unknown";
}

namespace {

// Exact where possible, float otherwise; nullopt at a singular point.
std::optional<double> denominator_value(const RatFun& r, const ExactPoint& p, const FloatPoint& fp) {
  if (!r.has_atoms()) {
    Scalar v = detail::eval_exact(r.denominator(), p);
    if (v == 0) return std::nullopt;
    return v.get_d();
  }
  const double v = detail::eval_float(r.denominator(), fp);
  if (!std::isfinite(v) || std::abs(v) < 1e-12) return std::nullopt;
  return v;
}

}  // namespace

ZeroVerdict classify_zero(const Expr& e, const SampleConfig& cfg) {
  ZeroVerdict out;
  const RatFun& r = e.normal();
  if (r.is_zero()) {
    out.status = ZeroVerdict::Status::Zero;
    return out;
  }
  const std::set<std::string> vars_set = r.variables();
  const std::vector<std::string> vars(vars_set.begin(), vars_set.end());
  PointSampler sampler(cfg);

  if (!r.has_atoms()) {
    // The normal form is not zero, so a witness exists; find a regular point.
    out.status = ZeroVerdict::Status::NonZero;
    ExactPoint p;
    for (const auto& v : vars) p[v] = 1;
    const int budget = 1000 + cfg.max_retries + cfg.count;
    for (int attempt = 0; attempt < budget; ++attempt) {
      if (attempt > 0) p = sampler.next(vars);
      try {
        Scalar v = evaluate(e, p);
        if (v != 0) {
          out.witness = p;
          out.value = to_string(v);
          return out;
        }
      } catch (const EvalError&) {
        continue;
      }
    }
    out.note = "no regular witness point found";
    return out;
  }

  int good = 0;
  int singular = 0;
  while (good < cfg.count) {
    ExactPoint p = sampler.next(vars);
    FloatPoint fp = to_float(p);
    auto den = denominator_value(r, p, fp);
    if (!den) {
      if (++singular > cfg.max_retries) {
        out.status = ZeroVerdict::Status::Unknown;
        out.note = "sample points exhausted at singular points";
        return out;
      }
      continue;
    }
    const double v = detail::eval_float(r.numerator(), fp) / *den;
    if (!std::isfinite(v)) {
      if (++singular > cfg.max_retries) {
        out.status = ZeroVerdict::Status::Unknown;
        out.note = "non-finite values at all retries";
        return out;
      }
      continue;
    }
    if (std::abs(v) >= cfg.tol) {
      out.status = ZeroVerdict::Status::NonZero;
      out.witness = p;
      std::ostringstream os;
      os.precision(17);
      os << v;
      out.value = os.str();
      return out;
    }
    ++good;
  }
  out.status = ZeroVerdict::Status::SampledZero;
  return out;
}

}  // namespace dirac::expr
