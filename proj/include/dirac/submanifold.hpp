#pragma once

// Dirac structures along a coordinate submanifold N = {y^a = 0} of a chart,
// normalized by nu N = span{d/dy^a}.  Sections "along N" are sections on the
// ambient chart whose coefficients have been restricted to N.

#include <optional>
#include <string>
#include <vector>

#include "dirac/courant.hpp"
#include "dirac/linalg.hpp"
#include "dirac/report.hpp"

namespace dirac::submanifold {

using cartan::Chart;
using cartan::Form;
using cartan::Multivector;
using courant::DiracFrame;
using courant::PointSubspace;
using courant::Section;
using expr::ExactPoint;
using expr::Expr;
using expr::SampleConfig;
using expr::Scalar;

class Normalized {
 public:
  // Throws UnknownSymbolError for names outside the chart.
  Normalized(Chart chart, const std::vector<std::string>& normal_coords);

  const Chart& chart() const { return chart_; }
  const std::vector<int>& normal() const { return normal_; }
  const std::vector<int>& tangent() const { return tangent_; }
  bool is_normal(int i) const;
  // The chart of N: the tangent coordinates.
  const Chart& submanifold_chart() const { return sub_; }

  // y^a -> 0
  const std::map<std::string, Expr>& on_n() const { return on_n_; }
  Expr restrict(const Expr& e) const { return expr::substitute(e, on_n_); }
  Section restrict(const Section& s) const { return courant::substitute(s, on_n_); }

  // Tangent (TN + T*N) and normal (nu N + nu*N) parts.
  Section tangent_part(const Section& s) const;
  Section normal_part(const Section& s) const;
  // A section along N with tangent parts only, moved to the chart of N.
  Section to_submanifold(const Section& s) const;
  Form to_submanifold(const Form& w) const;
  // The inverse embedding of components (zero normal components).
  Form from_submanifold(const Form& w) const;

 private:
  Chart chart_;
  std::vector<int> normal_;
  std::vector<int> tangent_;
  Chart sub_;
  std::map<std::string, Expr> on_n_;
};

// Riemannian metric g_ij with the cometric g^ij on 1-forms.
class Metric {
 public:
  // Throws PreconditionError if g is not symmetric or is singular as a
  // matrix of rational functions.
  Metric(Chart chart, linalg::EMatrix g);
  static Metric euclidean(const Chart& chart);

  const Chart& chart() const { return chart_; }
  const linalg::EMatrix& g() const { return g_; }
  const linalg::EMatrix& cometric() const { return co_; }
  Expr pair(const Form& a, const Form& b) const;  // g^ij a_i b_j

 private:
  Chart chart_;
  linalg::EMatrix g_;
  linalg::EMatrix co_;
};

enum class Direction { Pullback, Pushforward };

// Pullback {(Z, a|TN) : Z in T_pN, (Z, a) in L_p}; pushforward: the image of
// L_p cap (TM + ann nu N) under the projection along nu N + nu*N.  The result
// lives on the chart of N.  Throws PreconditionError if p is not on N or is
// a singular point.
PointSubspace restrict_at_point(const DiracFrame& l, const Normalized& n, const ExactPoint& p, Direction d);

// At sample points of N: K(N) = pr_TN (L cap (TN + ann TN)) (table "K(N)"),
// "properly-normalized" (both parts of every frame section lie in L) and, for
// frames given by a bivector P, "poisson-kernel" (TN cap sharp_P(ann TN) = 0).
Report kernel_and_properness(const DiracFrame& l, const Normalized& n, const SampleConfig& cfg);

struct InducedStructure {
  DiracFrame frame;  // on the chart of N
  Report report;     // "pullback-pushforward", "exact-sequence", then the Dirac checks of the frame
};

// Requires a properly normalized N (throws PreconditionError otherwise).
InducedStructure induced_structure(const DiracFrame& l, const Normalized& n, const SampleConfig& cfg);

// How a section of A_N is extended to a section of L: its coefficients in the
// frame, taken constant in y or multiplied by (1 + (y^1)^2).
enum class Extension { Constant, Scaled };

// The Courant bracket of extensions, restricted to N.  Throws
// PreconditionError if a section is not in A_N = {(X, a) in L|_N : X in TN}.
Section bracket_A(const DiracFrame& l, const Normalized& n, const Section& s1, const Section& s2, Extension e,
                  const SampleConfig& cfg = {});

// (X, a) -> (X, a|TN) on the chart of N.
Section iota_sharp(const Normalized& n, const Section& s);

struct SecondFundamentalForm {
  Form gauss;                    // nu*N part of the form part of bracket_A
  Form direct;                   // Z(a1(Y)) - a1([Z, Y]) + a2([Z, X]) with Z = d/dy^a
  std::optional<Form> poisson;   // -(L_Z P)(a1, a2), frames given by a bivector
  Report report;                 // "extension-independence", "gauss-direct", "poisson-formula"
};

// B on the tangent parts (X, a|TN) of s1, s2, which must lie in A_N.
SecondFundamentalForm second_fundamental_form(const DiracFrame& l, const Normalized& n, const Section& s1,
                                              const Section& s2, const SampleConfig& cfg);

// "cosymplectic": H(L, N) + TN = TM at sample points of N, with
// H = pr_TM (L cap (TM + ann TN)); "totally-dirac": properly normalized and B
// vanishes on the tangent parts of the frame along N.
Report cosymplectic_verdicts(const DiracFrame& l, const Normalized& n, const SampleConfig& cfg);

// {a, b}_P = L_{sharp a} b - L_{sharp b} a - d P(a, b)
Form koszul_bracket(const Multivector& p, const Form& a, const Form& b);

// D^P_a b from 2 g(D_a b, c) = (sharp a) g(b, c) + (sharp b) g(c, a) - (sharp c) g(a, b)
//                              + g({a, b}, c) + g({c, a}, b) + g({c, b}, a).
Form contravariant_derivative(const Multivector& p, const Metric& g, const Form& a, const Form& b);

// "metric-compatibility" and "torsion-free" on the coordinate coframe.
Report check_contravariant_derivative(const Multivector& p, const Metric& g, const SampleConfig& cfg);

struct GaussSplit {
  Form d_pn;  // D^P of extensions, restricted to N
  Form d_pi;  // D^Pi of the induced bivector, on the chart of N
  Form psi;   // d_pn - d_pi
  Form b;     // nu*N part of {a, b}_P along N
  Report report;  // "extension-independence", "gauss-identity", "skew-part"
};

// a, b are 1-forms along N with tangent components only.  Throws
// PreconditionError if nu N is not g-orthogonal to TN along N or N is not a
// properly normalized Poisson-Dirac submanifold.
GaussSplit gauss_split(const Multivector& p, const Metric& g, const Normalized& n, const Form& a, const Form& b,
                       const SampleConfig& cfg);

}  // namespace dirac::submanifold
