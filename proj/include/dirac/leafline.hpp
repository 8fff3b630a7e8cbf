#pragma once

// Dirac structures around an embedded presymplectic leaf S = {y = 0}.
//
// The chart's leaf coordinates y are the normal directions of S (the fibers
// of a tubular neighborhood); the transverse coordinates x run along S.  The
// linear model lives on the same chart, the normal coordinates y playing the
// role of the fiber coordinates eta of the normal bundle.

#include <map>
#include <tuple>
#include <utility>
#include <vector>

#include "dirac/coupling.hpp"

namespace dirac::leafline {

using cartan::Chart;
using cartan::Form;
using cartan::FrameSplit;
using cartan::Multivector;
using coupling::GeometricData;
using courant::DiracFrame;
using expr::Expr;
using expr::SampleConfig;
using expr::Scalar;

// Local basis H_u = (d_u + A^b_u d_b, alpha_uv dx^v), V^a = (B^ab d_b, dy^a - A^a_v dx^v).
struct LeafPresentation {
  FrameSplit split;  // A^b_u, keyed (b, u)
  Multivector b;     // B on the normal coordinates
  Form alpha;        // alpha on the leaf coordinates
  Report report;     // checks "leaf-vanishing" and "coupling-along-leaf"

  const Chart& chart() const { return split.chart(); }
  GeometricData data() const { return {split, alpha, b}; }
};

// Reads A, B, alpha off geometric data (or off a coupling frame) and checks
// A(x,0) = 0, B(x,0) = 0 and L + (F + ann F) = TM + T*M at points of S and
// near S.  Throws PreconditionError when S is not a leaf (A or B do not vanish
// on S, or the structure is not coupling).
LeafPresentation dw_coefficients(const GeometricData& data, const SampleConfig& cfg);
LeafPresentation dw_coefficients(const DiracFrame& l, const SampleConfig& cfg);

// Basis of L|_S indexed by chart coordinate: H_u for transverse u, V^a for
// normal a.  bracket(i, j) lists the coefficients of [e_i, e_j]_S in that basis.
struct BracketTable {
  std::map<std::pair<int, int>, std::vector<Expr>> brackets;  // i < j
};

struct LeafAlgebroid {
  BracketTable constant_extension;  // extensions with y-independent coefficients
  BracketTable scaled_extension;    // the same coefficients times (1 + y1^2)
  BracketTable formulas;            // dB/dy, dA/dy, dalpha/dy at y = 0
  Report report;                    // "extension-independence", "bracket-formulas", "bracket-in-L"
};

LeafAlgebroid leaf_algebroid(const LeafPresentation& pres, const SampleConfig& cfg);

// First-order data of the presentation along S; all coefficients depend on x only.
struct LinearModel {
  Chart chart;
  std::map<std::tuple<int, int, int>, Expr> gamma;  // (a, u, c): dA^a_u/dy^c
  std::map<std::tuple<int, int, int>, Expr> c;      // (a, b, c), a < b: dB^ab/dy^c
  std::map<std::pair<int, int>, Expr> varpi;        // (u, v), u < v: alpha_uv(x, 0)
  std::map<std::tuple<int, int, int>, Expr> r;      // (u, v, c), u < v: dalpha_uv/dy^c

  // A = gamma y, B = c y, alpha = varpi + r y.
  LeafPresentation presentation() const;
};

LinearModel linear_model(const LeafPresentation& pres);

// The frame of the linear model: (X_u, (varpi_uv + r_uvc y^c) dx^v) and
// (c^ab_e y^e d_b, dy^a - gamma^a_ue y^e dx^u) with X_u = d_u + gamma^a_ue y^e d_a.
DiracFrame linearize(const LeafPresentation& pres);

// Compares every coefficient function of pres with the model: values and first
// normal derivatives at y = 0.  Check "linear-approximation".
Report check_linear_approximation(const LeafPresentation& pres, const LinearModel& model, const SampleConfig& cfg);

// Rank of K = L cap TM at sample and grid points; when constant and spanned by
// coordinate fields d_z, checks (d_z, 0) in L and [(d_z, 0), l_i] in L.
// Checks "constant-kernel-rank", "coordinate-kernel", "z-independence".
Report reducible_normal_form_check(const DiracFrame& l, const SampleConfig& cfg);

}  // namespace dirac::leafline
