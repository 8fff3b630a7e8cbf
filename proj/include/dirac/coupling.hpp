#pragma once

// Foliation-coupling of Dirac structures on an adapted chart: the chart's leaf
// coordinates y span F, the others x are transverse.

#include <vector>

#include "dirac/cartan.hpp"
#include "dirac/courant.hpp"
#include "dirac/report.hpp"

namespace dirac::coupling {

using cartan::Chart;
using cartan::Form;
using cartan::FrameSplit;
using cartan::Multivector;
using courant::DiracFrame;
using courant::Section;
using expr::Expr;
using expr::SampleConfig;

// (H, sigma, Pi): H is the normal bundle of the split, sigma lives on the
// transverse coordinates (dx^u ^ dx^v), Pi on the leaf coordinates (d_a ^ d_b).
struct GeometricData {
  FrameSplit split;
  Form sigma;
  Multivector pi;
};

// Validates the purity of sigma and pi; throws PreconditionError otherwise.
GeometricData make_geometric_data(FrameSplit split, Form sigma, Multivector pi);

// Pointwise H~ = L cap (TM + ann F), H = its tangent projection and
// K* = {theta : (Y, theta) in L, Y in F}.  Checks "h-complement" (H is a
// complement of F) and "conormal-duality" (T*M = ann F + K*).
Report normal_distribution(const DiracFrame& l, const SampleConfig& cfg);

// L cap (F + ann F) = 0 at all sample points.  On pass the report carries the
// table "H frame" with the coefficients A of X_u = d_u + A^a_u d_a.
Report is_coupling(const DiracFrame& l, const SampleConfig& cfg);

// The differentiable normal bundle H(L, F), solved symbolically.  Throws
// PreconditionError when the defining system is singular.
FrameSplit normal_frame(const DiracFrame& l);

struct AlmostCouplingSplit {
  Report report;                  // check "almost-coupling"
  std::vector<Section> h_part;    // in H + H*
  std::vector<Section> f_part;    // in F + F*
};

// Splits each frame section along (H + H*) + (F + F*) and checks that both
// parts lie in L.  The returned parts are a generically independent selection.
AlmostCouplingSplit decompose_almost_coupling(const DiracFrame& l, const FrameSplit& split, const SampleConfig& cfg);

// Requires a coupling structure (throws PreconditionError otherwise).
GeometricData extract_geometric_data(const DiracFrame& l, const SampleConfig& cfg);

// {(X_u, flat_sigma X_u)} + {(sharp_Pi lambda^a, lambda^a)}.
DiracFrame reconstruct(const GeometricData& data);

// Conditions on geometric data:
//   cond-i    [Pi, Pi](lambda^a, lambda^b, lambda^c) = 0
//   cond-ii   d sigma(X_u, X_v, X_w) = 0
//   cond-iii  pr_F [X_u, X_v] = sharp_Pi d''(sigma(X_u, X_v))
//   cond-iv   L_{X_u} Pi = 0
Report check_integrability(const GeometricData& data, const SampleConfig& cfg);

// Conditions ac-1 .. ac-4 on the parts of an almost coupling structure; the
// report also contains the "almost-coupling" check of the decomposition.
Report check_integrability_almost_coupling(const DiracFrame& l, const FrameSplit& split, const SampleConfig& cfg);

// P = P' + P'' of bidegrees (2,0) and (0,2); with a, b, c in Omega^{1,0} and
// l, m, n in Omega^{0,1}:
//   poisson-1  (L_{sharp' c} P')(a, b) = d'c(sharp' a, sharp' b)
//   poisson-2  (L_{sharp'' n} P')(a, b) = -n([sharp' a, sharp' b])
//   poisson-3  (L_{sharp' c} P'')(l, m) = 0
//   poisson-4  (L_{sharp'' n} P'')(l, m) = d''n(sharp'' l, sharp'' m)
Report check_integrability_poisson(const Multivector& p, const FrameSplit& split, const SampleConfig& cfg);

// tau = tau' + tau'' of bidegrees (2,0) and (0,2):
//   presymplectic-1  d''tau'' = 0
//   presymplectic-2  d'tau' = 0
//   presymplectic-3  d''tau' + partial tau'' = 0
//   presymplectic-4  d'tau'' = 0
// The table "d tau" lists the bigraded components of d tau.
Report check_integrability_presymplectic(const Form& tau, const FrameSplit& split, const SampleConfig& cfg);

// Part of bidegree (transverse, leaf) of a bivector in the split's frame.
Multivector multivector_part(const Multivector& p, const FrameSplit& split, int transverse, int leaf);
// Projection of a vector field to F along H.
Multivector project_to_leaf(const Multivector& z, const FrameSplit& split);

}  // namespace dirac::coupling
