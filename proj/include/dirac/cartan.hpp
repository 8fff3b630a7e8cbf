#pragma once

// Exterior calculus on a single adapted chart.
//
// Conventions used throughout the library:
//   (a ^ b)(X, Y) = a(X) b(Y) - a(Y) b(X)  (determinant convention)
//   i(d_j) dx^{i_0} ^ ... ^ dx^{i_k} = sum_r (-1)^r [j = i_r] dx^{I \ i_r}
//   i(a)(X ^ Y) = a(X) Y - a(Y) X
//   sharp_P a = i(a) P,  flat_s X = i(X) s,  so that b(sharp_P a) = P(a, b)
//   Schouten bracket normalized by (1/2)[P,P](df, dg, dh) = sum_cycl {{f,g},h}
//   with {f, g} = P(df, dg).

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "dirac/expr.hpp"

namespace dirac::cartan {

using expr::Expr;
using expr::ExactPoint;
using expr::Scalar;

// Ordered coordinates; the leaf names span the foliation F = span{d/dy}.
class Chart {
 public:
  Chart() = default;
  explicit Chart(std::vector<std::string> coords, const std::vector<std::string>& leaf = {});

  const std::vector<std::string>& coords() const { return coords_; }
  int n() const { return static_cast<int>(coords_.size()); }
  int p() const { return static_cast<int>(leaf_.size()); }
  int q() const { return static_cast<int>(transverse_.size()); }
  int index_of(const std::string& name) const;  // throws UnknownSymbolError
  bool is_leaf(int i) const { return leaf_mask_ >> i & 1U; }
  const std::vector<int>& leaf() const { return leaf_; }
  const std::vector<int>& transverse() const { return transverse_; }
  const std::string& name(int i) const { return coords_[static_cast<std::size_t>(i)]; }
  Expr coord(int i) const { return Expr::symbol(name(i)); }
  Chart with_leaf(const std::vector<std::string>& leaf) const { return Chart(coords_, leaf); }

  Expr parse(const std::string& text) const { return expr::parse_expr(text, coords_); }

  bool operator==(const Chart& o) const { return coords_ == o.coords_ && leaf_mask_ == o.leaf_mask_; }

 private:
  std::vector<std::string> coords_;
  std::vector<int> leaf_;
  std::vector<int> transverse_;
  std::uint32_t leaf_mask_ = 0;
};

using Mask = std::uint32_t;

std::vector<int> mask_indices(Mask m);
int popcount(Mask m);

struct FormTag {};
struct VectorTag {};

// Alternating tensors with components on strictly increasing index sets,
// stored by bitmask; zero components are not stored.
template <class Tag>
class Alternating {
 public:
  Alternating() = default;
  Alternating(Chart chart, int degree);

  // The basis element d_{i_1} ^ ... or dx^{i_1} ^ ... (indices in any order).
  static Alternating basis(const Chart& chart, const std::vector<int>& indices);
  // Degree-1 element from per-coordinate components.
  static Alternating from_components(const Chart& chart, const std::vector<Expr>& comps);
  static Alternating scalar(const Chart& chart, const Expr& f);

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }
  const std::map<Mask, Expr>& components() const { return comps_; }

  Expr get(Mask m) const;
  Expr operator[](int i) const { return get(Mask{1} << i); }  // degree 1
  Expr get(std::vector<int> indices) const;                 // any order, signed
  void set(Mask m, const Expr& v);
  void add_to(Mask m, const Expr& v);
  bool is_zero() const { return comps_.empty(); }

  Alternating operator-() const;
  Alternating operator+(const Alternating& o) const;
  Alternating operator-(const Alternating& o) const;
  Alternating operator*(const Expr& f) const;
  template <class F>
  Alternating map(F f) const {
    Alternating out(chart_, degree_);
    for (const auto& [m, v] : comps_) out.set(m, f(v));
    return out;
  }

  // Same chart, degree and normal-form components.
  bool equals(const Alternating& o) const;
  std::string str() const;

 private:
  Chart chart_;
  int degree_ = 0;
  std::map<Mask, Expr> comps_;
};

using Form = Alternating<FormTag>;
using Multivector = Alternating<VectorTag>;

// Sign of the permutation sorting the concatenation of the index sets a, b
// (which must be disjoint).
int merge_sign(Mask a, Mask b);

template <class Tag>
Alternating<Tag> wedge(const Alternating<Tag>& a, const Alternating<Tag>& b);

// Full contraction of a k-form with a k-vector: sum_I w_I P^I.
Expr contract(const Form& w, const Multivector& p);
// w(X_1, ..., X_k) under the determinant convention.
Expr evaluate_form(const Form& w, const std::vector<Multivector>& vectors);
Expr evaluate_multivector(const Multivector& p, const std::vector<Form>& forms);

// i(X) w for a vector field X; i(a) P for a one-form a.
Form interior(const Multivector& x, const Form& w);
Multivector interior(const Form& a, const Multivector& p);

Form ext_d(const Form& w);
Multivector lie_bracket(const Multivector& x, const Multivector& y);
Form lie_derivative(const Multivector& x, const Form& w);
Multivector lie_derivative(const Multivector& x, const Multivector& p);
// Bivectors only.
Multivector schouten_bracket(const Multivector& p, const Multivector& q);

Multivector sharp(const Multivector& p, const Form& a);
Form flat(const Form& s, const Multivector& x);

// X(f) and df.
Expr apply(const Multivector& x, const Expr& f);
Form differential(const Chart& chart, const Expr& f);

// Coordinate fields and coframe.
Multivector partial(const Chart& chart, int i);
Form dx(const Chart& chart, int i);

// Componentwise substitution / evaluation.
template <class Tag>
Alternating<Tag> substitute(const Alternating<Tag>& t, const std::map<std::string, Expr>& repl) {
  return t.map([&](const Expr& e) { return expr::substitute(e, repl); });
}

// Componentwise zero classification: first component that fails decides.
struct TensorVerdict {
  expr::ZeroVerdict verdict;
  Mask component = 0;
};
template <class Tag>
TensorVerdict classify_zero(const Alternating<Tag>& t, const expr::SampleConfig& cfg);

// Split of TM = H + F with H spanned by X_u = d/dx^u + A^a_u d/dy^a.
class FrameSplit {
 public:
  FrameSplit() = default;
  explicit FrameSplit(Chart chart);  // coordinate split, A = 0
  FrameSplit(Chart chart, std::map<std::pair<int, int>, Expr> a);  // key (a, u): leaf index, transverse index

  const Chart& chart() const { return chart_; }
  Expr a(int leaf_index, int transverse_index) const;
  const std::map<std::pair<int, int>, Expr>& a_table() const { return a_; }

  // E_i = X_u for transverse i, d/dy^a for leaf i.
  Multivector frame(int i) const;
  // e^i = dx^u for transverse i, lambda^a = dy^a - A^a_u dx^u for leaf i.
  Form coframe(int i) const;
  Multivector horizontal(int u) const { return frame(u); }
  Form lambda(int a) const { return coframe(a); }

  // Components w(E_I) in the bigraded frame, stored on the same index masks.
  Form frame_components(const Form& w) const;
  // Inverse of frame_components: sum_I c_I e^I.
  Form assemble(const Form& frame_comps) const;
  // Frame components of a multivector in the dual coframe: P(e^I).
  Multivector frame_components(const Multivector& p) const;
  Multivector assemble(const Multivector& frame_comps) const;

  // (number of transverse indices, number of leaf indices)
  std::pair<int, int> bidegree(Mask m) const;
  // Part of w of the given bidegree, as a form in the coordinate coframe.
  Form part(const Form& w, int transverse, int leaf) const;

 private:
  Chart chart_;
  std::map<std::pair<int, int>, Expr> a_;
};

struct BigradedD {
  Form d_prime;         // bidegree (+1, 0)
  Form d_double_prime;  // bidegree (0, +1)
  Form partial;         // bidegree (+2, -1)
  Form remainder;       // any other bidegree; identically zero for adapted charts
};

BigradedD bigraded_d(const Form& w, const FrameSplit& split);

}  // namespace dirac::cartan
