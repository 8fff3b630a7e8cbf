#pragma once

// Small constructors for test fixtures written as strings.

#include <string>
#include <tuple>
#include <vector>

#include "dirac/cartan.hpp"
#include "dirac/courant.hpp"

namespace dirac::testing {

using cartan::Chart;
using cartan::Form;
using cartan::Multivector;
using courant::Section;
using expr::Expr;

inline std::vector<Expr> parse_all(const Chart& c, const std::vector<std::string>& comps) {
  std::vector<Expr> e;
  for (const auto& s : comps) e.push_back(c.parse(s));
  return e;
}

inline Multivector vec(const Chart& c, const std::vector<std::string>& comps) {
  return Multivector::from_components(c, parse_all(c, comps));
}

inline Form form1(const Chart& c, const std::vector<std::string>& comps) {
  return Form::from_components(c, parse_all(c, comps));
}

// Bivector from entries (i, j, expr) meaning expr * d_i ^ d_j.
inline Multivector bivector(const Chart& c, const std::vector<std::tuple<int, int, std::string>>& entries) {
  Multivector p(c, 2);
  for (const auto& [i, j, s] : entries) p = p + Multivector::basis(c, {i, j}) * c.parse(s);
  return p;
}

inline Form two_form(const Chart& c, const std::vector<std::tuple<int, int, std::string>>& entries) {
  Form w(c, 2);
  for (const auto& [i, j, s] : entries) w = w + Form::basis(c, {i, j}) * c.parse(s);
  return w;
}

inline Section section(const Chart& c, const std::vector<std::string>& x, const std::vector<std::string>& a) {
  return {vec(c, x), form1(c, a)};
}

inline bool vanishes(const Form& f) { return cartan::classify_zero(f, {}).verdict.vanishes(); }
inline bool vanishes(const Multivector& f) { return cartan::classify_zero(f, {}).verdict.vanishes(); }

}  // namespace dirac::testing
