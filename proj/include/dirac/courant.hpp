#pragma once

// The standard Courant algebroid TM + T*M on a chart.
//
//   g((X,a),(Y,b))     = (b(X) + a(Y)) / 2
//   omega((X,a),(Y,b)) = (a(Y) - b(X)) / 2
//   [(X,a),(Y,b)]      = ([X,Y], L_X b - L_Y a + d omega)
//   partial f          = (0, df), so that g(c, partial f) = (rho c) f / 2

#include <optional>
#include <string>
#include <vector>

#include "dirac/cartan.hpp"
#include "dirac/linalg.hpp"
#include "dirac/report.hpp"

namespace dirac::courant {

using cartan::Chart;
using cartan::Form;
using cartan::Multivector;
using expr::ExactPoint;
using expr::Expr;
using expr::SampleConfig;
using expr::Scalar;
using linalg::QMatrix;
using linalg::QVector;

struct Section {
  Multivector vector;
  Form form;

  Section() = default;
  Section(Multivector x, Form a);
  static Section zero(const Chart& chart);

  const Chart& chart() const { return vector.chart(); }
  Section operator+(const Section& o) const;
  Section operator-(const Section& o) const;
  Section operator-() const;
  Section operator*(const Expr& f) const;
  bool equals(const Section& o) const;
  std::string str() const;
};

struct Pairing {
  Expr g;
  Expr omega;
};

Pairing pairing(const Section& a, const Section& b);
Expr g(const Section& a, const Section& b);
Section courant_bracket(const Section& a, const Section& b);
Section partial_f(const Chart& chart, const Expr& f);

Section substitute(const Section& s, const std::map<std::string, Expr>& repl);

enum class Origin { Frame, Poisson, Presymplectic, Reconstructed, Linearized };
std::string to_string(Origin o);

struct DiracFrame {
  Chart chart;
  std::vector<Section> sections;
  Origin origin = Origin::Frame;
  std::optional<Multivector> bivector;  // Poisson origin
  std::optional<Form> two_form;         // presymplectic origin

  std::vector<Expr> coefficients() const;
};

DiracFrame frame_of(const Chart& chart, std::vector<Section> sections);
DiracFrame graph_of_poisson(const Multivector& p);
DiracFrame graph_of_presymplectic(const Form& tau);

// Sample points of a chart at which all given expressions evaluate; fixed
// coordinates are held at the given values.  With grid = true the points
// {-box, 0, box}^k (free coordinates) come first.
struct PointSet {
  std::vector<ExactPoint> points;
  bool exhausted = false;  // ran out of retries before reaching cfg.count
};
PointSet sample_points(const Chart& chart, const std::vector<Expr>& must_be_regular, const SampleConfig& cfg,
                       const std::map<std::string, Scalar>& fixed = {}, bool grid = false, std::uint64_t stream = 1);

// Fiber coordinates (X^1..X^n, a_1..a_n).
QVector fiber_vector(const Section& s, const ExactPoint& p);

struct PointSubspace {
  ExactPoint point;
  int n = 0;
  QMatrix rows;       // independent, each of length 2n
  bool exact = true;  // false if transcendental coefficients were rounded
};

// Throws PreconditionError at a singular point.
PointSubspace fiber_at(const DiracFrame& l, const ExactPoint& p);
bool is_maximal_isotropic(const PointSubspace& s);

Report check_almost_dirac(const DiracFrame& l, const SampleConfig& cfg);
Report check_dirac(const DiracFrame& l, const SampleConfig& cfg);
// Courant algebroid axioms on the sections (at least three) and the function f.
Report check_courant_axioms(const std::vector<Section>& sections, const Expr& f, const SampleConfig& cfg);

struct CharacteristicData {
  QMatrix l_plus;       // basis (reduced echelon) of the tangent projection, length n
  QMatrix omega_plus;   // omega_plus(b_i, b_j) on that basis
  QMatrix kernel;       // L cap TM, tangent vectors
  QMatrix conormal;     // L cap T*M, covectors
  int omega_rank = 0;
};

// omega_plus(X1, X2) = a1(X2) for (X1, a1) in L.
CharacteristicData characteristic_data_at(const DiracFrame& l, const ExactPoint& p);

// Pointwise basis (l_u + A^b_u f_b, alpha_uv lambda^v), (B^ab f_b, phi^a - A^a_v lambda^v)
// for the split of coordinates into `tangent` indices (l_u = d_u) and the rest (f_b = d_b).
struct DWBasis {
  std::vector<int> tangent;
  std::vector<int> complement;
  QMatrix a;      // a[b][u]
  QMatrix b;      // b[a][b], antisymmetric
  QMatrix alpha;  // alpha[u][v], antisymmetric
  QMatrix rows;   // the basis, horizontal elements first
};

// Throws PreconditionError if the subspace is not maximal isotropic or not
// transverse to the chosen complement.
DWBasis dw_basis_at(const PointSubspace& lp, const std::vector<int>& tangent);

// dim L+ mod 2 at the sample points.
Report check_leaf_parity(const DiracFrame& l, const SampleConfig& cfg);

}  // namespace dirac::courant
