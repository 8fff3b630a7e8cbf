#include <gtest/gtest.h>

#include <random>

#include "dirac/courant.hpp"
#include "dirac/errors.hpp"
#include "support/catalog.hpp"

using namespace dirac;
using namespace dirac::courant;
using namespace dirac::testing;

namespace {

const Chart kPlane({"x", "y"});
const Chart kLine({"x"});
const Chart& kR3 = r3();
const Chart& kR4 = r4();

QMatrix q(std::initializer_list<std::initializer_list<int>> rows) {
  QMatrix m;
  for (const auto& r : rows) {
    QVector v;
    for (int x : r) v.emplace_back(x);
    m.push_back(v);
  }
  return m;
}

}  // namespace

TEST(Pairing, Examples) {
  const Section a = section(kPlane, {"1", "0"}, {"0", "1"});
  const Section b = section(kPlane, {"0", "1"}, {"1", "0"});
  const Pairing p = pairing(a, b);
  EXPECT_TRUE(p.g.equals(1));
  EXPECT_TRUE(p.omega.equals(0));
  EXPECT_TRUE(g(section(kPlane, {"x", "y"}, {"0", "0"}), section(kPlane, {"x*y", "1"}, {"0", "0"})).is_zero());
  EXPECT_TRUE(pairing(section(kPlane, {"1", "0"}, {"0", "0"}), section(kPlane, {"0", "0"}, {"x", "0"})).omega.equals(
      Expr(Scalar(-1, 2)) * kPlane.parse("x")));
}

TEST(Pairing, ChartMismatchThrows) {
  EXPECT_THROW(g(section(kPlane, {"1", "0"}, {"0", "0"}), section(kR3, {"1", "0", "0"}, {"0", "0", "0"})),
               ChartMismatchError);
}

TEST(CourantBracket, Examples) {
  const Section df = partial_f(kPlane, kPlane.parse("x^2*y"));
  const Section dg = partial_f(kPlane, kPlane.parse("sin(x) + y"));
  EXPECT_TRUE(courant_bracket(df, dg).equals(Section::zero(kPlane)));
  EXPECT_TRUE(courant_bracket(section(kPlane, {"1", "0"}, {"0", "0"}), section(kPlane, {"0", "1"}, {"0", "0"}))
                  .equals(Section::zero(kPlane)));
  const Section b = courant_bracket(section(kPlane, {"0", "x"}, {"1", "0"}), section(kPlane, {"1", "0"}, {"0", "0"}));
  EXPECT_TRUE(b.equals(section(kPlane, {"0", "-1"}, {"0", "0"}))) << b.str();
}

TEST(CourantBracket, Antisymmetry) {
  const std::vector<Section> s{section(kR3, {"x2", "x1*x3", "1"}, {"x3^2", "0", "x1"}),
                               section(kR3, {"1/(1 + x1^2)", "0", "x2"}, {"1", "x1*x2", "0"}),
                               section(kR3, {"cos(x3)", "1", "0"}, {"0", "exp(x1)", "x2"})};
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) {
      const Section sum = courant_bracket(s[i], s[j]) + courant_bracket(s[j], s[i]);
      EXPECT_TRUE(vanishes(sum.vector) && vanishes(sum.form)) << i << "," << j;
    }
  }
}

TEST(PartialF, Examples) {
  EXPECT_TRUE(partial_f(kPlane, kPlane.parse("x")).equals(section(kPlane, {"0", "0"}, {"1", "0"})));
  EXPECT_TRUE(g(section(kPlane, {"1", "0"}, {"0", "0"}), partial_f(kPlane, kPlane.parse("x"))).equals(Scalar(1, 2)));
  EXPECT_TRUE(partial_f(kPlane, Expr(Scalar(7, 3))).equals(Section::zero(kPlane)));
}

TEST(GraphOf, Examples) {
  const DiracFrame t = graph_of_presymplectic(two_form(kPlane, {{0, 1, "1"}}));
  ASSERT_EQ(t.sections.size(), 2U);
  EXPECT_TRUE(t.sections[0].equals(section(kPlane, {"1", "0"}, {"0", "1"})));
  EXPECT_TRUE(t.sections[1].equals(section(kPlane, {"0", "1"}, {"-1", "0"})));
  EXPECT_EQ(t.origin, Origin::Presymplectic);

  const DiracFrame p = graph_of_poisson(bivector(kPlane, {{0, 1, "1"}}));
  EXPECT_TRUE(p.sections[0].equals(section(kPlane, {"0", "1"}, {"1", "0"})));
  EXPECT_TRUE(p.sections[1].equals(section(kPlane, {"-1", "0"}, {"0", "1"})));
  EXPECT_EQ(p.origin, Origin::Poisson);

  const DiracFrame z = graph_of_poisson(Multivector(kR3, 2));
  for (int i = 0; i < 3; ++i) EXPECT_TRUE(z.sections[static_cast<std::size_t>(i)].equals({Multivector(kR3, 1), cartan::dx(kR3, i)}));
}

TEST(AlmostDirac, Examples) {
  EXPECT_TRUE(check_almost_dirac(graph_of_presymplectic(two_form(kPlane, {{0, 1, "1"}})), {}).passed());

  const Report bad = check_almost_dirac(frame_of(kLine, {section(kLine, {"1"}, {"1"})}), {});
  EXPECT_EQ(bad.status_of("isotropy"), Status::Fail);
  const Check* iso = bad.find("isotropy");
  ASSERT_FALSE(iso->witnesses.empty());
  EXPECT_EQ(iso->witnesses[0].values.back().second, "1");

  EXPECT_TRUE(check_almost_dirac(
                  frame_of(kPlane, {section(kPlane, {"1", "0"}, {"0", "0"}), section(kPlane, {"0", "0"}, {"0", "1"})}),
                  {})
                  .passed());
}

TEST(AlmostDirac, RankDeficientFrameFails) {
  const DiracFrame l =
      frame_of(kPlane, {section(kPlane, {"1", "0"}, {"0", "0"}), section(kPlane, {"x", "0"}, {"0", "0"})});
  const Report r = check_almost_dirac(l, {});
  EXPECT_EQ(r.status_of("isotropy"), Status::Pass);
  EXPECT_EQ(r.status_of("rank"), Status::Fail);
}

TEST(Dirac, PoissonCatalog) {
  EXPECT_TRUE(check_dirac(graph_of_poisson(bivector(kR4, {{0, 1, "1"}, {2, 3, "-3"}})), {}).passed());
  EXPECT_TRUE(check_dirac(graph_of_poisson(so3_bivector()), {}).passed());

  const Report r = check_dirac(graph_of_poisson(bivector(kR4, {{0, 1, "1"}, {2, 3, "x1"}})), {});
  EXPECT_EQ(r.status_of("isotropy"), Status::Pass);
  EXPECT_EQ(r.status_of("closure"), Status::Fail);
  const Check* c = r.find("closure");
  ASSERT_FALSE(c->witnesses.empty());
  EXPECT_EQ(c->witnesses[0].values.front().first, "triple");
}

TEST(Dirac, PresymplecticCatalog) {
  EXPECT_TRUE(check_dirac(graph_of_presymplectic(two_form(kPlane, {{0, 1, "1"}})), {}).passed());
  EXPECT_TRUE(check_dirac(graph_of_presymplectic(two_form(kR4, {{0, 1, "1"}, {2, 3, "1"}})), {}).passed());
  // d(x2 dx1 ^ dx2) = dx2 ^ dx1 ^ dx2 = 0, so this graph is Dirac; x3 dx1 ^ dx2 is not closed.
  EXPECT_TRUE(check_dirac(graph_of_presymplectic(two_form(kR3, {{0, 1, "x2"}})), {}).passed());
  EXPECT_TRUE(check_dirac(graph_of_presymplectic(two_form(kR3, {{0, 1, "x1"}})), {}).passed());
  EXPECT_EQ(check_dirac(graph_of_presymplectic(two_form(kR3, {{0, 1, "x3"}})), {}).status_of("closure"), Status::Fail);
}

TEST(Dirac, ClosureIsInvalidWithoutIsotropy) {
  const Report r = check_dirac(frame_of(kLine, {section(kLine, {"1"}, {"1"})}), {});
  EXPECT_EQ(r.status_of("closure"), Status::Invalid);
}

TEST(Dirac, FrameChecksAreInvariantUnderFunctionalChangeOfFrame) {
  // Closure on a frame implies closure for all sections: replacing the frame by
  // f-multiples and combinations with function coefficients keeps the verdict.
  auto mix = [](const DiracFrame& l) {
    const Chart& c = l.chart;
    std::vector<Section> s = l.sections;
    const Expr f = c.parse("1 + x1^2");
    const Expr h = c.parse("x2*x3 - 2");
    std::vector<Section> out{s[0] * f, s[1] + s[0] * h, s[2] * c.parse("3") + s[1] * c.parse("x1")};
    for (std::size_t i = 3; i < s.size(); ++i) out.push_back(s[i]);
    return frame_of(c, out);
  };
  EXPECT_TRUE(check_dirac(mix(graph_of_poisson(so3_bivector())), {}).passed());
  EXPECT_EQ(check_dirac(mix(graph_of_poisson(bivector(kR4, {{0, 1, "1"}, {2, 3, "x1"}}))), {}).status_of("closure"),
            Status::Fail);
}

TEST(CourantAxioms, ExactDifferentials) {
  const std::vector<Section> s{partial_f(kR3, kR3.parse("x1*x2")), partial_f(kR3, kR3.parse("x3^2")),
                               partial_f(kR3, kR3.parse("x1 + x2*x3"))};
  EXPECT_TRUE(check_courant_axioms(s, kR3.parse("x1*x3"), {}).passed());
}

TEST(CourantAxioms, AnchorOnExample) {
  const Section a = section(kPlane, {"0", "x"}, {"1", "0"});
  const Section b = section(kPlane, {"1", "0"}, {"0", "0"});
  EXPECT_TRUE(courant_bracket(a, b).vector.equals(cartan::lie_bracket(a.vector, b.vector)));
  EXPECT_TRUE(courant_bracket(a, b).vector.equals(vec(kPlane, {"0", "-1"})));
}

TEST(CourantAxioms, GraphSectionsAndTranscendentalSections) {
  const DiracFrame t = graph_of_presymplectic(two_form(kPlane, {{0, 1, "1"}}));
  const std::vector<Section> poly{t.sections[0] * kPlane.parse("x*y"), t.sections[1] * kPlane.parse("1 + x^2"),
                                  t.sections[0] + t.sections[1] * kPlane.parse("y")};
  EXPECT_TRUE(check_courant_axioms(poly, kPlane.parse("x - y^2"), {}).passed());
  const std::vector<Section> trans{section(kR3, {"sin(x2)", "x1", "0"}, {"0", "x3", "1"}),
                                   section(kR3, {"1", "0", "exp(x1)"}, {"x2", "0", "0"}),
                                   section(kR3, {"0", "x3^2", "x1"}, {"cos(x1)", "1", "x2"})};
  const Report r = check_courant_axioms(trans, kR3.parse("x1*x2*x3"), {});
  EXPECT_TRUE(r.passed());
}

TEST(CourantAxioms, RandomPolynomialTriplesOnR4) {
  std::mt19937 rng(7);
  std::uniform_int_distribution<int> coef(-3, 3);
  const std::vector<std::string> monomials{"1", "x1", "x2", "x3", "x4", "x1*x2", "x3^2", "x2*x4"};
  auto poly = [&]() {
    Expr e;
    for (int k = 0; k < 2; ++k) {
      e += Expr(coef(rng)) * kR4.parse(monomials[static_cast<std::size_t>(rng() % monomials.size())]);
    }
    return e;
  };
  auto random_section = [&]() {
    std::vector<Expr> x;
    std::vector<Expr> a;
    for (int i = 0; i < 4; ++i) {
      x.push_back(poly());
      a.push_back(poly());
    }
    return Section(Multivector::from_components(kR4, x), Form::from_components(kR4, a));
  };
  for (int t = 0; t < 3; ++t) {
    const std::vector<Section> s{random_section(), random_section(), random_section()};
    const Report r = check_courant_axioms(s, poly(), {});
    for (const auto& c : r.checks()) {
      EXPECT_EQ(c.status, Status::Pass) << c.id;
      EXPECT_TRUE(c.exact) << c.id;
    }
  }
}

TEST(CourantAxioms, NeedsThreeSections) {
  EXPECT_THROW(check_courant_axioms({Section::zero(kPlane)}, Expr(1), {}), PreconditionError);
}

TEST(CharacteristicData, Symplectic) {
  const DiracFrame t = graph_of_presymplectic(two_form(kPlane, {{0, 1, "1"}}));
  const CharacteristicData cd = characteristic_data_at(t, {{"x", Scalar(1, 3)}, {"y", 2}});
  EXPECT_EQ(cd.l_plus, q({{1, 0}, {0, 1}}));
  EXPECT_EQ(cd.omega_plus, q({{0, 1}, {-1, 0}}));
  EXPECT_TRUE(cd.kernel.empty());
  EXPECT_TRUE(cd.conormal.empty());
  EXPECT_EQ(cd.omega_rank, 2);
}

TEST(CharacteristicData, LinearPoisson) {
  const DiracFrame l = graph_of_poisson(bivector(kR3, {{0, 1, "x3"}}));
  const CharacteristicData origin = characteristic_data_at(l, {{"x1", 0}, {"x2", 0}, {"x3", 0}});
  EXPECT_TRUE(origin.l_plus.empty());
  EXPECT_TRUE(origin.kernel.empty());
  EXPECT_EQ(origin.conormal.size(), 3U);

  const CharacteristicData up = characteristic_data_at(l, {{"x1", 0}, {"x2", 0}, {"x3", 1}});
  EXPECT_EQ(up.l_plus, q({{1, 0, 0}, {0, 1, 0}}));
  // omega+(sharp a, sharp b) = a(sharp b) = P(b, a): with P(dx1, dx2) = 1 the
  // induced form is -dx1 ^ dx2 on span{d1, d2}.
  EXPECT_EQ(up.omega_plus, q({{0, -1}, {1, 0}}));
  EXPECT_EQ(up.omega_rank, 2);
  EXPECT_EQ(up.conormal, q({{0, 0, 1}}));
}

TEST(CharacteristicData, KernelOfPresymplecticForm) {
  const DiracFrame l = graph_of_presymplectic(two_form(kR3, {{0, 1, "1"}}));
  const CharacteristicData cd = characteristic_data_at(l, {{"x1", 0}, {"x2", 0}, {"x3", 0}});
  EXPECT_EQ(cd.l_plus.size(), 3U);
  EXPECT_EQ(cd.kernel, q({{0, 0, 1}}));
  EXPECT_EQ(cd.omega_rank, 2);
  // dim ker omega+ = dim (L cap TM)
  EXPECT_EQ(static_cast<int>(cd.l_plus.size()) - cd.omega_rank, static_cast<int>(cd.kernel.size()));
}

TEST(CharacteristicData, SingularPointThrows) {
  const DiracFrame l = graph_of_poisson(bivector(kPlane, {{0, 1, "1/x"}}));
  EXPECT_THROW(characteristic_data_at(l, {{"x", 0}, {"y", 0}}), PreconditionError);
}

TEST(DWBasis, Examples) {
  PointSubspace s;
  s.n = 2;
  s.rows = q({{1, 0, 0, 0}, {0, 0, 0, 1}});
  DWBasis b = dw_basis_at(s, {0});
  EXPECT_EQ(b.a, q({{0}}));
  EXPECT_EQ(b.alpha, q({{0}}));
  EXPECT_EQ(b.b, q({{0}}));
  EXPECT_EQ(b.rows, s.rows);

  const DiracFrame t = graph_of_presymplectic(two_form(kPlane, {{0, 1, "1"}}));
  const PointSubspace tp = fiber_at(t, {{"x", 5}, {"y", -1}});
  b = dw_basis_at(tp, {0, 1});
  EXPECT_EQ(b.alpha, q({{0, 1}, {-1, 0}}));
  EXPECT_TRUE(b.complement.empty());
  EXPECT_TRUE(linalg::row_space_equal(b.rows, tp.rows, 4));

  PointSubspace cot;
  cot.n = 2;
  cot.rows = q({{0, 0, 1, 0}, {0, 0, 0, 1}});
  b = dw_basis_at(cot, {});
  EXPECT_EQ(b.b, q({{0, 0}, {0, 0}}));
  EXPECT_TRUE(b.a.empty() || b.a[0].empty());
}

TEST(DWBasis, MixedBlocksSpanTheSubspace) {
  const DiracFrame l = graph_of_poisson(so3_bivector());
  for (const auto& p : std::vector<expr::ExactPoint>{{{"x1", 1}, {"x2", 2}, {"x3", -1}},
                                                     {{"x1", Scalar(1, 2)}, {"x2", 0}, {"x3", 3}}}) {
    const PointSubspace lp = fiber_at(l, p);
    EXPECT_THROW(dw_basis_at(lp, {0}), PreconditionError);  // sharp dx^1 has no d_1 part
    const DWBasis b = dw_basis_at(lp, {0, 1});
    EXPECT_TRUE(linalg::row_space_equal(b.rows, lp.rows, 6));
    EXPECT_EQ(b.b, q({{0}}));
    EXPECT_EQ(b.alpha[0][1], -b.alpha[1][0]);
  }
}

TEST(DWBasis, Preconditions) {
  PointSubspace s;
  s.n = 2;
  s.rows = q({{1, 0, 1, 0}, {0, 1, 0, 0}});
  EXPECT_THROW(dw_basis_at(s, {0}), PreconditionError);  // not isotropic
  s.rows = q({{1, 0, 0, 0}, {0, 1, 0, 0}});
  EXPECT_THROW(dw_basis_at(s, {0}), PreconditionError);  // TM is not transverse to span{d_y} + ...
}

TEST(LeafParity, Catalog) {
  EXPECT_TRUE(check_leaf_parity(graph_of_poisson(so3_bivector()), {}).passed());
  EXPECT_TRUE(check_leaf_parity(graph_of_poisson(bivector(kR3, {{0, 1, "x3"}})), {}).passed());
  EXPECT_TRUE(check_leaf_parity(graph_of_presymplectic(two_form(kR4, {{0, 1, "1"}, {2, 3, "1"}})), {}).passed());
  EXPECT_TRUE(check_leaf_parity(graph_of_presymplectic(two_form(kR3, {{0, 1, "x1"}})), {}).passed());
}

TEST(LeafParity, NonDiracFrameChangesParity) {
  // L+ = span{d_x, x d_y} drops from dimension 2 to 1 on x = 0.
  const DiracFrame l =
      frame_of(kPlane, {section(kPlane, {"1", "0"}, {"0", "0"}), section(kPlane, {"0", "x"}, {"0", "1 - x"})});
  EXPECT_EQ(characteristic_data_at(l, {{"x", 1}, {"y", 0}}).l_plus.size(), 2U);
  EXPECT_EQ(characteristic_data_at(l, {{"x", 0}, {"y", 0}}).l_plus.size(), 1U);
  const auto pts = sample_points(kPlane, l.coefficients(), {}, {}, true);
  EXPECT_EQ(pts.points.size(), 9U + 16U);
}

TEST(SamplePoints, FixedCoordinatesAndSingularities) {
  SampleConfig cfg;
  cfg.count = 5;
  const auto pts = sample_points(kR3, {kR3.parse("1/x1")}, cfg, {{"x3", 7}});
  ASSERT_EQ(pts.points.size(), 5U);
  for (const auto& p : pts.points) {
    EXPECT_EQ(p.at("x3"), 7);
    EXPECT_NE(p.at("x1"), 0);
  }
  const auto never = sample_points(kR3, {kR3.parse("1/(x3 - 7)")}, cfg, {{"x3", 7}});
  EXPECT_TRUE(never.exhausted);
  EXPECT_TRUE(never.points.empty());
}
