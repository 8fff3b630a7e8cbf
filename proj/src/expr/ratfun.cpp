#include "dirac/detail/ratfun.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <tuple>

#include "dirac/errors.hpp"

namespace dirac::expr::detail {

namespace {

// "x2" < "x10": digit runs compare numerically.
int natural_compare(const std::string& a, const std::string& b) {
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.size() && j < b.size()) {
    if (std::isdigit(static_cast<unsigned char>(a[i])) && std::isdigit(static_cast<unsigned char>(b[j]))) {
      std::size_t i2 = i;
      std::size_t j2 = j;
      while (i2 < a.size() && std::isdigit(static_cast<unsigned char>(a[i2]))) ++i2;
      while (j2 < b.size() && std::isdigit(static_cast<unsigned char>(b[j2]))) ++j2;
      std::string da = a.substr(i, i2 - i);
      std::string db = b.substr(j, j2 - j);
      da.erase(0, std::min(da.find_first_not_of('0'), da.size()));
      db.erase(0, std::min(db.find_first_not_of('0'), db.size()));
      if (da.size() != db.size()) return da.size() < db.size() ? -1 : 1;
      if (int c = da.compare(db); c != 0) return c < 0 ? -1 : 1;
      i = i2;
      j = j2;
      continue;
    }
    if (a[i] != b[j]) return a[i] < b[j] ? -1 : 1;
    ++i;
    ++j;
  }
  if (i < a.size()) return 1;
  if (j < b.size()) return -1;
  return a.compare(b) < 0 ? -1 : (a == b ? 0 : 1);
}

class Registry {
 public:
  Gen intern(Generator::Kind kind, const std::string& key, const RatFun* arg) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = table_.find({kind, key});
    if (it != table_.end()) return it->second.get();
    auto g = std::make_unique<Generator>();
    g->kind = kind;
    g->key = key;
    if (arg != nullptr) g->arg = std::make_shared<const RatFun>(*arg);
    Gen out = g.get();
    table_.emplace(std::make_pair(kind, key), std::move(g));
    return out;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<Generator::Kind, std::string>, std::unique_ptr<Generator>> table_;
};

Registry& registry() {
  static Registry r;
  return r;
}

Scalar ipow(const Scalar& base, int e) {
  Scalar out = 1;
  Scalar b = base;
  unsigned k = static_cast<unsigned>(e);
  while (k != 0) {
    if (k & 1U) out *= b;
    b *= b;
    k >>= 1U;
  }
  return out;
}

Poly ipow(const Poly& base, int e) {
  Poly out(Scalar(1));
  Poly b = base;
  unsigned k = static_cast<unsigned>(e);
  while (k != 0) {
    if (k & 1U) out = out * b;
    k >>= 1U;
    if (k != 0) b = b * b;
  }
  return out;
}

}  // namespace

Gen variable(const std::string& name) {
  return registry().intern(Generator::Kind::Variable, name, nullptr);
}

Gen atom(Generator::Kind kind, const RatFun& arg) {
  return registry().intern(kind, canonical_text(arg), &arg);
}

bool gen_less(Gen a, Gen b) {
  if (a == b) return false;
  if (a->kind != b->kind) return a->kind < b->kind;
  if (a->kind == Generator::Kind::Variable) return natural_compare(a->key, b->key) < 0;
  return a->key < b->key;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& [g, e] : powers) d += e;
  return d;
}

int compare(const Monomial& a, const Monomial& b) {
  const int da = a.degree();
  const int db = b.degree();
  if (da != db) return da > db ? 1 : -1;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.powers.size() && j < b.powers.size()) {
    const auto& [ga, ea] = a.powers[i];
    const auto& [gb, eb] = b.powers[j];
    if (ga == gb) {
      if (ea != eb) return ea > eb ? 1 : -1;
      ++i;
      ++j;
    } else {
      return gen_less(ga, gb) ? 1 : -1;
    }
  }
  if (i < a.powers.size()) return 1;
  if (j < b.powers.size()) return -1;
  return 0;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial out;
  out.powers.reserve(a.powers.size() + b.powers.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.powers.size() || j < b.powers.size()) {
    if (j == b.powers.size() || (i < a.powers.size() && gen_less(a.powers[i].first, b.powers[j].first))) {
      out.powers.push_back(a.powers[i++]);
    } else if (i == a.powers.size() || gen_less(b.powers[j].first, a.powers[i].first)) {
      out.powers.push_back(b.powers[j++]);
    } else {
      out.powers.emplace_back(a.powers[i].first, a.powers[i].second + b.powers[j].second);
      ++i;
      ++j;
    }
  }
  return out;
}

std::optional<Monomial> divide(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t i = 0;
  for (const auto& [gb, eb] : b.powers) {
    while (i < a.powers.size() && gen_less(a.powers[i].first, gb)) out.powers.push_back(a.powers[i++]);
    if (i == a.powers.size() || a.powers[i].first != gb || a.powers[i].second < eb) return std::nullopt;
    if (a.powers[i].second > eb) out.powers.emplace_back(gb, a.powers[i].second - eb);
    ++i;
  }
  while (i < a.powers.size()) out.powers.push_back(a.powers[i++]);
  return out;
}

// ---------------------------------------------------------------- Poly

Poly::Poly(const Scalar& c) {
  if (c != 0) terms_.push_back({Monomial{}, c});
}

Poly Poly::generator(Gen g) {
  Poly p;
  p.terms_.push_back({Monomial{{{g, 1}}}, Scalar(1)});
  return p;
}

bool Poly::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].mono.powers.empty());
}

Scalar Poly::constant_value() const {
  if (!terms_.empty() && terms_.back().mono.powers.empty()) return terms_.back().coeff;
  return 0;
}

int Poly::total_degree() const { return terms_.empty() ? 0 : terms_.front().mono.degree(); }

Poly Poly::operator-() const {
  Poly out = *this;
  for (auto& t : out.terms_) t.coeff = -t.coeff;
  return out;
}

Poly operator+(const Poly& a, const Poly& b) {
  Poly out;
  out.terms_.reserve(a.terms_.size() + b.terms_.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < a.terms_.size() && j < b.terms_.size()) {
    const int c = compare(a.terms_[i].mono, b.terms_[j].mono);
    if (c > 0) {
      out.terms_.push_back(a.terms_[i++]);
    } else if (c < 0) {
      out.terms_.push_back(b.terms_[j++]);
    } else {
      Scalar s = a.terms_[i].coeff + b.terms_[j].coeff;
      if (s != 0) out.terms_.push_back({a.terms_[i].mono, s});
      ++i;
      ++j;
    }
  }
  while (i < a.terms_.size()) out.terms_.push_back(a.terms_[i++]);
  while (j < b.terms_.size()) out.terms_.push_back(b.terms_[j++]);
  return out;
}

Poly operator-(const Poly& a, const Poly& b) { return a + (-b); }

Poly operator*(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.terms_.size() == 1) return b.times(a.terms_[0].mono, a.terms_[0].coeff);
  if (b.terms_.size() == 1) return a.times(b.terms_[0].mono, b.terms_[0].coeff);
  PolyBuilder pb;
  for (const auto& ta : a.terms_) pb.add_scaled(b, ta.mono, ta.coeff);
  return pb.build();
}

Poly Poly::scaled(const Scalar& c) const {
  if (c == 0) return {};
  Poly out = *this;
  for (auto& t : out.terms_) t.coeff *= c;
  return out;
}

Poly Poly::times(const Monomial& m, const Scalar& c) const {
  if (c == 0) return {};
  Poly out;
  out.terms_.reserve(terms_.size());
  // multiplication by a monomial preserves the order
  for (const auto& t : terms_) out.terms_.push_back({t.mono * m, t.coeff * c});
  return out;
}

std::optional<Poly> Poly::divide_exact(const Poly& d) const {
  if (d.is_zero()) throw std::domain_error("polynomial division by zero");
  if (is_zero()) return Poly{};
  PolyBuilder q;
  Poly r = *this;
  const Term& ld = d.leading();
  while (!r.is_zero()) {
    const Term& lr = r.leading();
    auto m = divide(lr.mono, ld.mono);
    if (!m) return std::nullopt;
    Scalar c = lr.coeff / ld.coeff;
    q.add(*m, c);
    r = r - d.times(*m, c);
  }
  return q.build();
}

std::pair<Scalar, Poly> Poly::content_primitive() const {
  if (is_zero()) return {Scalar(0), Poly{}};
  mpz_class lcm_den = 1;
  for (const auto& t : terms_) mpz_lcm(lcm_den.get_mpz_t(), lcm_den.get_mpz_t(), t.coeff.get_den_mpz_t());
  mpz_class g = 0;
  for (const auto& t : terms_) {
    mpz_class v = t.coeff.get_num() * (lcm_den / t.coeff.get_den());
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), v.get_mpz_t());
  }
  Scalar content(g, lcm_den);
  content.canonicalize();
  if (terms_.front().coeff < 0) content = -content;
  return {content, scaled(1 / content)};
}

Monomial Poly::monomial_content() const {
  if (terms_.empty()) return {};
  Monomial m = terms_.front().mono;
  for (const auto& t : terms_) {
    Monomial next;
    std::size_t j = 0;
    for (const auto& [g, e] : m.powers) {
      while (j < t.mono.powers.size() && gen_less(t.mono.powers[j].first, g)) ++j;
      if (j < t.mono.powers.size() && t.mono.powers[j].first == g) {
        next.powers.emplace_back(g, std::min(e, t.mono.powers[j].second));
      }
    }
    m = std::move(next);
    if (m.powers.empty()) break;
  }
  return m;
}

bool Poly::operator==(const Poly& o) const { return compare_to(o) == 0; }

int Poly::compare_to(const Poly& o) const {
  const std::size_t n = std::min(terms_.size(), o.terms_.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(terms_[i].mono, o.terms_[i].mono); c != 0) return c;
    if (terms_[i].coeff != o.terms_[i].coeff) return terms_[i].coeff < o.terms_[i].coeff ? -1 : 1;
  }
  if (terms_.size() != o.terms_.size()) return terms_.size() < o.terms_.size() ? -1 : 1;
  return 0;
}

void Poly::collect_generators(std::set<Gen>& out) const {
  for (const auto& t : terms_)
    for (const auto& [g, e] : t.mono.powers) out.insert(g);
}

void PolyBuilder::add(const Monomial& m, const Scalar& c) {
  if (c == 0) return;
  auto [it, inserted] = acc_.try_emplace(m, c);
  if (!inserted) it->second += c;
}

void PolyBuilder::add(const Poly& p) {
  for (const auto& t : p.terms()) add(t.mono, t.coeff);
}

void PolyBuilder::add_scaled(const Poly& p, const Monomial& m, const Scalar& c) {
  for (const auto& t : p.terms()) add(t.mono * m, t.coeff * c);
}

Poly PolyBuilder::build() {
  Poly out;
  out.terms_.reserve(acc_.size());
  for (auto& [m, c] : acc_)
    if (c != 0) out.terms_.push_back({m, c});
  acc_.clear();
  return out;
}

// ---------------------------------------------------------------- gcd

namespace {

std::map<int, Poly> split(const Poly& p, Gen v) {
  std::map<int, PolyBuilder> acc;
  for (const auto& t : p.terms()) {
    int e = 0;
    Monomial rest;
    for (const auto& [g, k] : t.mono.powers) {
      if (g == v) {
        e = k;
      } else {
        rest.powers.emplace_back(g, k);
      }
    }
    acc[e].add(rest, t.coeff);
  }
  std::map<int, Poly> out;
  for (auto& [e, b] : acc) out.emplace(e, b.build());
  return out;
}

int degree_in(const Poly& p, Gen v) {
  int d = 0;
  for (const auto& t : p.terms())
    for (const auto& [g, k] : t.mono.powers)
      if (g == v) d = std::max(d, k);
  return d;
}

Poly leading_coefficient_in(const Poly& p, Gen v, int deg) {
  PolyBuilder b;
  for (const auto& t : p.terms()) {
    int e = 0;
    Monomial rest;
    for (const auto& [g, k] : t.mono.powers) {
      if (g == v) {
        e = k;
      } else {
        rest.powers.emplace_back(g, k);
      }
    }
    if (e == deg) b.add(rest, t.coeff);
  }
  return b.build();
}

Poly normalized(const Poly& p) {
  if (p.is_zero()) return p;
  return p.content_primitive().second;
}

Poly content_in(const Poly& p, Gen v) {
  Poly g;
  for (const auto& [e, c] : split(p, v)) {
    g = gcd(g, c);
    if (g.is_constant()) break;
  }
  return g;
}

Poly primitive_in(const Poly& p, Gen v) {
  Poly c = content_in(p, v);
  if (c.is_constant()) return normalized(p);
  return normalized(*p.divide_exact(c));
}

// Pseudo-remainder of a by b as polynomials in v.
Poly prem(Poly a, const Poly& b, Gen v) {
  const int db = degree_in(b, v);
  const Poly lb = leading_coefficient_in(b, v, db);
  while (!a.is_zero()) {
    const int da = degree_in(a, v);
    if (da < db) break;
    const Poly la = leading_coefficient_in(a, v, da);
    Monomial shift;
    if (da > db) shift.powers.emplace_back(v, da - db);
    a = a * lb - (b * la).times(shift, 1);
  }
  return a;
}

using Univariate = std::vector<Scalar>;  // coefficient of v^k at index k

void trim(Univariate& u) {
  while (!u.empty() && u.back() == 0) u.pop_back();
}

// Image of p under the other generators -> values[g].
Univariate image_in(const Poly& p, Gen v, const std::map<Gen, Scalar>& values) {
  Univariate out(degree_in(p, v) + 1);
  for (const auto& t : p.terms()) {
    Scalar c = t.coeff;
    int e = 0;
    for (const auto& [g, k] : t.mono.powers) {
      if (g == v) {
        e = k;
      } else {
        c *= ipow(values.at(g), k);
      }
    }
    out[e] += c;
  }
  return out;
}

int univariate_gcd_degree(Univariate a, Univariate b) {
  trim(a);
  trim(b);
  while (!b.empty()) {
    while (a.size() >= b.size()) {
      const Scalar f = a.back() / b.back();
      const std::size_t shift = a.size() - b.size();
      for (std::size_t i = 0; i < b.size(); ++i) a[i + shift] -= f * b[i];
      trim(a);
      if (a.empty()) break;
    }
    std::swap(a, b);
  }
  return static_cast<int>(a.size()) - 1;
}

// True when a and b provably share no factor of positive degree in v: their
// images at a point where both leading coefficients in v survive are coprime.
bool coprime_in(const Poly& a, const Poly& b, Gen v, const std::set<Gen>& gens) {
  std::uint64_t state = 0x9e3779b97f4a7c15ULL;
  for (int attempt = 0; attempt < 2; ++attempt) {
    std::map<Gen, Scalar> values;
    for (Gen g : gens) {
      state = state * 6364136223846793005ULL + 1442695040888963407ULL;
      values.emplace(g, Scalar(static_cast<long>((state >> 33) % 61) - 30));
    }
    Univariate ia = image_in(a, v, values);
    Univariate ib = image_in(b, v, values);
    if (ia.back() == 0 || ib.back() == 0) continue;
    return univariate_gcd_degree(std::move(ia), std::move(ib)) == 0;
  }
  return false;
}

Monomial monomial_gcd(const Monomial& a, const Monomial& b) {
  Monomial out;
  std::size_t j = 0;
  for (const auto& [g, e] : a.powers) {
    while (j < b.powers.size() && gen_less(b.powers[j].first, g)) ++j;
    if (j < b.powers.size() && b.powers[j].first == g) out.powers.emplace_back(g, std::min(e, b.powers[j].second));
  }
  return out;
}

}  // namespace

Poly gcd(const Poly& a, const Poly& b) {
  if (a.is_zero()) return normalized(b);
  if (b.is_zero()) return normalized(a);
  if (a.is_constant() || b.is_constant()) return Poly(Scalar(1));
  if (a.terms().size() == 1 || b.terms().size() == 1) {
    return Poly(Scalar(1)).times(monomial_gcd(a.monomial_content(), b.monomial_content()), 1);
  }
  std::set<Gen> ga;
  std::set<Gen> gb;
  a.collect_generators(ga);
  b.collect_generators(gb);
  Gen v = nullptr;
  for (Gen g : ga)
    if (gb.contains(g) && (v == nullptr || gen_less(g, v))) v = g;
  if (v == nullptr) return Poly(Scalar(1));
  std::set<Gen> all = ga;
  all.insert(gb.begin(), gb.end());
  bool coprime = true;
  for (Gen g : ga) {
    if (gb.contains(g) && !coprime_in(a, b, g, all)) {
      coprime = false;
      break;
    }
  }
  if (coprime) return Poly(Scalar(1));
  const Poly g_content = gcd(content_in(a, v), content_in(b, v));
  Poly pa = primitive_in(a, v);
  Poly pb = primitive_in(b, v);
  if (degree_in(pa, v) < degree_in(pb, v)) std::swap(pa, pb);
  while (true) {
    Poly r = prem(pa, pb, v);
    if (r.is_zero()) break;
    if (degree_in(r, v) == 0) {
      pb = Poly(Scalar(1));
      break;
    }
    pa = std::move(pb);
    pb = primitive_in(r, v);
  }
  return normalized(pb * g_content);
}

// ---------------------------------------------------------------- RatFun

namespace {

Poly exact_quotient(const Poly& a, const Poly& g) {
  if (g.is_constant()) return a.scaled(1 / g.constant_value());
  return *a.divide_exact(g);
}

}  // namespace

RatFun::RatFun(const Scalar& c) : num_(c) {}

RatFun::RatFun(Poly num) : num_(std::move(num)) {}

RatFun RatFun::generator(Gen g) { return RatFun(Poly::generator(g)); }

RatFun RatFun::fraction(const Poly& num, const Poly& den) {
  if (den.is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "division by the zero function");
  RatFun out;
  if (num.is_zero()) return out;
  const Poly g = gcd(num, den);
  Poly n = exact_quotient(num, g);
  Poly d = exact_quotient(den, g);
  auto [c, dp] = d.content_primitive();
  out.num_ = n.scaled(1 / c);
  out.den_ = std::move(dp);
  return out;
}

RatFun RatFun::operator-() const {
  RatFun out = *this;
  out.num_ = -out.num_;
  return out;
}

RatFun operator+(const RatFun& a, const RatFun& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_polynomial() && b.is_polynomial()) return RatFun(a.num_ + b.num_);
  if (a.den_ == b.den_) return RatFun::fraction(a.num_ + b.num_, a.den_);
  const Poly g = gcd(a.den_, b.den_);
  const Poly ad = exact_quotient(a.den_, g);
  const Poly bd = exact_quotient(b.den_, g);
  return RatFun::fraction(a.num_ * bd + b.num_ * ad, a.den_ * bd);
}

RatFun operator-(const RatFun& a, const RatFun& b) { return a + (-b); }

RatFun operator*(const RatFun& a, const RatFun& b) {
  if (a.is_zero() || b.is_zero()) return {};
  if (a.is_polynomial() && b.is_polynomial()) return RatFun(a.num_ * b.num_);
  // inputs are reduced, so only cross cancellations remain
  const Poly g1 = gcd(a.num_, b.den_);
  const Poly g2 = gcd(b.num_, a.den_);
  Poly n = exact_quotient(a.num_, g1) * exact_quotient(b.num_, g2);
  Poly d = exact_quotient(a.den_, g2) * exact_quotient(b.den_, g1);
  RatFun out;
  auto [c, dp] = d.content_primitive();
  out.num_ = n.scaled(1 / c);
  out.den_ = std::move(dp);
  return out;
}

RatFun operator/(const RatFun& a, const RatFun& b) { return a * b.inverse(); }

RatFun RatFun::inverse() const {
  if (is_zero()) throw EvalError(EvalError::Kind::DivisionByZero, "inverse of the zero function");
  RatFun out;
  auto [c, np] = num_.content_primitive();
  out.num_ = den_.scaled(1 / c);
  out.den_ = std::move(np);
  return out;
}

RatFun RatFun::pow(int k) const {
  if (k < 0) return inverse().pow(-k);
  RatFun out;
  out.num_ = ipow(num_, k);
  out.den_ = ipow(den_, k);
  return out;
}

RatFun RatFun::derivative(Gen var) const {
  RatFun dn = poly_derivative(num_, var);
  if (is_polynomial()) return dn;
  RatFun dd = poly_derivative(den_, var);
  return (dn - *this * dd) * RatFun(den_).inverse();
}

RatFun RatFun::substitute(const std::map<Gen, RatFun>& repl) const {
  return substitute_poly(num_, repl) / substitute_poly(den_, repl);
}

std::set<Gen> RatFun::generators() const {
  std::set<Gen> out;
  num_.collect_generators(out);
  den_.collect_generators(out);
  return out;
}

std::set<std::string> RatFun::variables() const {
  std::set<std::string> out;
  for (Gen g : generators()) {
    if (g->kind == Generator::Kind::Variable) {
      out.insert(g->key);
    } else {
      auto inner = g->arg->variables();
      out.insert(inner.begin(), inner.end());
    }
  }
  return out;
}

bool RatFun::has_atoms() const {
  for (Gen g : generators())
    if (g->kind != Generator::Kind::Variable) return true;
  return false;
}

RatFun make_atom(Generator::Kind kind, const RatFun& arg) {
  if (arg.is_zero()) return RatFun(Scalar(kind == Generator::Kind::Sin ? 0 : 1));
  return RatFun::generator(atom(kind, arg));
}

RatFun poly_derivative(const Poly& p, Gen var) {
  PolyBuilder poly_part;
  RatFun rational_part;
  for (const auto& t : p.terms()) {
    for (std::size_t k = 0; k < t.mono.powers.size(); ++k) {
      const auto& [g, e] = t.mono.powers[k];
      Monomial rest = t.mono;
      if (e == 1) {
        rest.powers.erase(rest.powers.begin() + static_cast<std::ptrdiff_t>(k));
      } else {
        rest.powers[k].second -= 1;
      }
      const Scalar c = t.coeff * e;
      if (g->kind == Generator::Kind::Variable) {
        if (g == var) poly_part.add(rest, c);
        continue;
      }
      RatFun inner = g->arg->derivative(var);
      if (inner.is_zero()) continue;
      RatFun outer;
      switch (g->kind) {
        case Generator::Kind::Sin:
          outer = make_atom(Generator::Kind::Cos, *g->arg);
          break;
        case Generator::Kind::Cos:
          outer = -make_atom(Generator::Kind::Sin, *g->arg);
          break;
        default:
          outer = RatFun::generator(g);
          break;
      }
      RatFun piece = RatFun(Poly(Scalar(1)).times(rest, c)) * outer * inner;
      if (piece.is_polynomial()) {
        poly_part.add(piece.numerator());
      } else {
        rational_part = rational_part + piece;
      }
    }
  }
  return RatFun(poly_part.build()) + rational_part;
}

RatFun substitute_poly(const Poly& p, const std::map<Gen, RatFun>& repl) {
  std::map<Gen, RatFun> image;
  for (const auto& t : p.terms()) {
    for (const auto& [g, e] : t.mono.powers) {
      if (image.contains(g)) continue;
      if (auto it = repl.find(g); it != repl.end()) {
        image.emplace(g, it->second);
      } else if (g->kind == Generator::Kind::Variable) {
        image.emplace(g, RatFun::generator(g));
      } else {
        image.emplace(g, make_atom(g->kind, g->arg->substitute(repl)));
      }
    }
  }
  RatFun out;
  PolyBuilder unchanged;
  for (const auto& t : p.terms()) {
    RatFun term(t.coeff);
    for (const auto& [g, e] : t.mono.powers) term = term * image.at(g).pow(e);
    out = out + term;
  }
  return out;
}

Scalar eval_exact(const Poly& p, const ExactPoint& pt) {
  std::map<Gen, Scalar> values;
  Scalar sum = 0;
  for (const auto& t : p.terms()) {
    Scalar v = t.coeff;
    for (const auto& [g, e] : t.mono.powers) {
      auto it = values.find(g);
      if (it == values.end()) {
        if (g->kind != Generator::Kind::Variable) {
          throw EvalError(EvalError::Kind::Transcendental,
                          "exact evaluation of a transcendental function");
        }
        auto pit = pt.find(g->key);
        if (pit == pt.end()) {
          throw EvalError(EvalError::Kind::MissingCoordinate, "point does not cover coordinate " + g->key);
        }
        it = values.emplace(g, pit->second).first;
      }
      v *= ipow(it->second, e);
    }
    sum += v;
  }
  return sum;
}

namespace {

// Value of p and the sum of the magnitudes of its terms.
std::pair<double, double> eval_float_with_scale(const Poly& p, const FloatPoint& pt) {
  std::map<Gen, double> values;
  double sum = 0.0;
  double scale = 0.0;
  for (const auto& t : p.terms()) {
    double v = t.coeff.get_d();
    for (const auto& [g, e] : t.mono.powers) {
      auto it = values.find(g);
      if (it == values.end()) {
        double x = 0.0;
        if (g->kind == Generator::Kind::Variable) {
          auto pit = pt.find(g->key);
          if (pit == pt.end()) {
            throw EvalError(EvalError::Kind::MissingCoordinate, "point does not cover coordinate " + g->key);
          }
          x = pit->second;
        } else {
          const double u = eval_float(*g->arg, pt);
          x = g->kind == Generator::Kind::Sin ? std::sin(u) : g->kind == Generator::Kind::Cos ? std::cos(u) : std::exp(u);
        }
        it = values.emplace(g, x).first;
      }
      v *= std::pow(it->second, e);
    }
    sum += v;
    scale += std::abs(v);
  }
  return {sum, scale};
}

}  // namespace

double eval_float(const Poly& p, const FloatPoint& pt) { return eval_float_with_scale(p, pt).first; }

double eval_float(const RatFun& r, const FloatPoint& pt) {
  // A denominator that cancels to rounding level is indistinguishable from zero.
  const auto [d, scale] = eval_float_with_scale(r.denominator(), pt);
  if (std::abs(d) <= 64 * std::numeric_limits<double>::epsilon() * scale) {
    throw EvalError(EvalError::Kind::DivisionByZero, "division by zero at the evaluation point");
  }
  return eval_float(r.numerator(), pt) / d;
}

}  // namespace dirac::expr::detail
