#pragma once

// Structures shared by the module tests and the acceptance suite.

#include "dirac/coupling.hpp"
#include "support/builders.hpp"

namespace dirac::testing {

using coupling::GeometricData;
using courant::DiracFrame;

// R^4 with coordinates (x1, x2, y1, y2) and leaves {x = const}.
inline const Chart& foliated_r4() {
  static const Chart c({"x1", "x2", "y1", "y2"}, {"y1", "y2"});
  return c;
}

inline const Chart& r3() {
  static const Chart c({"x1", "x2", "x3"});
  return c;
}

inline const Chart& r4() {
  static const Chart c({"x1", "x2", "x3", "x4"});
  return c;
}

// x3 d1^d2 + x1 d2^d3 + x2 d3^d1
inline Multivector so3_bivector() { return bivector(r3(), {{0, 1, "x3"}, {1, 2, "x1"}, {2, 0, "x2"}}); }

// d1^d2 + x1 d3^d4: not Poisson.
inline Multivector broken_bivector() { return bivector(r4(), {{0, 1, "1"}, {2, 3, "x1"}}); }

// dx1^dx2 + dy1^dy2
inline Form block_two_form() { return two_form(foliated_r4(), {{0, 1, "1"}, {2, 3, "1"}}); }

// d_x1^d_x2 + d_y1^d_y2
inline Multivector block_bivector() { return bivector(foliated_r4(), {{0, 1, "1"}, {2, 3, "1"}}); }

inline GeometricData make_data(const std::map<std::pair<int, int>, std::string>& a, const std::string& sigma,
                               const std::string& pi) {
  const Chart& c = foliated_r4();
  std::map<std::pair<int, int>, Expr> ae;
  for (const auto& [k, v] : a) ae[k] = c.parse(v);
  return coupling::make_geometric_data(cartan::FrameSplit(c, ae), two_form(c, {{0, 1, sigma}}),
                                       bivector(c, {{2, 3, pi}}));
}

// Coordinate H, sigma = (1 + x1^2) dx1^dx2, Pi = (1 + y1^2) d_y1^d_y2: integrable.
inline GeometricData flat_data() { return make_data({}, "1 + x1^2", "1 + y1^2"); }

// X2 = d_x2 + x1 y1 d_y1, sigma = (1 - y2) dx1^dx2, Pi = y1 d_y1^d_y2: integrable with
// curvature pr_F [X1, X2] = y1 d_y1 balanced by sigma.
inline GeometricData curved_data() { return make_data({{{2, 1}, "x1*y1"}}, "1 - y2", "y1"); }

}  // namespace dirac::testing
