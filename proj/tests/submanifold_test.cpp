#include <gtest/gtest.h>

#include "dirac/errors.hpp"
#include "dirac/submanifold.hpp"
#include "support/catalog.hpp"

using namespace dirac;
using namespace dirac::submanifold;
using namespace dirac::testing;
using courant::graph_of_poisson;
using courant::graph_of_presymplectic;

namespace {

const Chart kPlane({"x", "y"});

Section on(const Chart& c, const std::vector<std::string>& xs, const std::vector<std::string>& as) {
  return section(c, xs, as);
}

bool same_rows(const PointSubspace& s, const linalg::QMatrix& rows) {
  return static_cast<int>(s.rows.size()) == s.n &&
         linalg::row_space_equal(s.rows, rows, static_cast<std::size_t>(2 * s.n));
}

// x3 d1^d2 on R^3 with N = {x3 = 0}.
Multivector x3_bivector() { return bivector(r3(), {{0, 1, "x3"}}); }
const Normalized& x3_plane() {
  static const Normalized n(r3(), {"x3"});
  return n;
}
const Normalized& r4_plane() {
  static const Normalized n(r4(), {"x3", "x4"});
  return n;
}

Multivector split_bivector() { return bivector(r4(), {{0, 1, "1"}, {2, 3, "1"}}); }

// (1 + x3) d1^d2 on R^4: x3, x4 are Casimirs and N = {x3 = x4 = 0} has B != 0.
Multivector casimir_bivector() { return bivector(r4(), {{0, 1, "1 + x3"}}); }

Metric curved_metric() {
  const Chart& c = r4();
  auto e = [&](const std::string& s) { return c.parse(s); };
  // Blocks of determinant 1, so the cometric stays polynomial.
  return {c, {{e("1"), e("x2"), e("0"), e("0")},
              {e("x2"), e("1 + x2^2"), e("0"), e("0")},
              {e("0"), e("0"), e("1"), e("x3 + x4")},
              {e("0"), e("0"), e("x3 + x4"), e("1 + (x3 + x4)^2")}}};
}

}  // namespace

// ---------------------------------------------------------------- restrict_at_point

TEST(RestrictAtPoint, SymplecticPlaneOverTheXAxis) {
  const Normalized n(kPlane, {"y"});
  const DiracFrame l = graph_of_presymplectic(two_form(kPlane, {{0, 1, "1"}}));
  const expr::ExactPoint p{{"x", Scalar(1, 3)}, {"y", 0}};
  EXPECT_TRUE(same_rows(restrict_at_point(l, n, p, Direction::Pullback), {{1, 0}}));
  EXPECT_TRUE(same_rows(restrict_at_point(l, n, p, Direction::Pushforward), {{0, 1}}));
}

TEST(RestrictAtPoint, PoissonPlanePullsBackToTheTangentBundle) {
  const Normalized n(kPlane, {"y"});
  const DiracFrame l = graph_of_poisson(bivector(kPlane, {{0, 1, "1"}}));
  const expr::ExactPoint p{{"x", Scalar(-2)}, {"y", 0}};
  EXPECT_TRUE(same_rows(restrict_at_point(l, n, p, Direction::Pullback), {{1, 0}}));
}

TEST(RestrictAtPoint, PointOffTheSubmanifoldThrows) {
  const Normalized n(kPlane, {"y"});
  const DiracFrame l = graph_of_poisson(bivector(kPlane, {{0, 1, "1"}}));
  EXPECT_THROW(restrict_at_point(l, n, {{"x", 0}, {"y", 1}}, Direction::Pullback), PreconditionError);
}

TEST(RestrictAtPoint, BothDirectionsAreMaximalIsotropic) {
  const std::vector<std::pair<DiracFrame, Normalized>> cases{
      {graph_of_poisson(so3_bivector()), Normalized(r3(), {"x3"})},
      {graph_of_poisson(broken_bivector()), Normalized(r4(), {"x2"})},
      {graph_of_presymplectic(two_form(r4(), {{0, 1, "x3"}, {1, 2, "1"}, {2, 3, "x1"}})), Normalized(r4(), {"x1", "x4"})},
      {graph_of_presymplectic(two_form(r3(), {{0, 1, "x1"}})), Normalized(r3(), {"x2"})},
  };
  for (const auto& [l, n] : cases) {
    const auto pts = courant::sample_points(l.chart, l.coefficients(), {}, {{l.chart.name(n.normal().front()), 0}});
    for (auto p : pts.points) {
      for (int a : n.normal()) p[l.chart.name(a)] = 0;
      for (Direction d : {Direction::Pullback, Direction::Pushforward}) {
        EXPECT_TRUE(courant::is_maximal_isotropic(restrict_at_point(l, n, p, d)));
      }
    }
  }
}

// ---------------------------------------------------------------- kernel_and_properness

TEST(KernelAndProperness, SymplecticPlaneHasFullKernelOnTheAxis) {
  const Normalized n(kPlane, {"y"});
  const Report r = kernel_and_properness(graph_of_presymplectic(two_form(kPlane, {{0, 1, "1"}})), n, {});
  ASSERT_FALSE(r.tables().empty());
  for (const auto& [k, v] : r.tables().front().entries) EXPECT_EQ(v, "dim K = 1");
}

TEST(KernelAndProperness, LinearPlaneBivectorIsProperlyNormalized) {
  const Report r = kernel_and_properness(graph_of_poisson(x3_bivector()), x3_plane(), {});
  EXPECT_TRUE(r.passed());
  for (const auto& [k, v] : r.tables().front().entries) EXPECT_EQ(v, "dim K = 0");
}

TEST(KernelAndProperness, So3FailsOnTheEquatorialPlane) {
  const Report r = kernel_and_properness(graph_of_poisson(so3_bivector()), x3_plane(), {});
  const Check* k = r.find("poisson-kernel");
  ASSERT_NE(k, nullptr);
  EXPECT_EQ(k->status, Status::Fail);
  ASSERT_FALSE(k->witnesses.empty());
  // The witness is a multiple of x2 d1 - x1 d2: no d3 component.
  const std::string vec = k->witnesses.front().values.front().second;
  EXPECT_EQ(vec.substr(vec.size() - 3), " 0]");
  EXPECT_EQ(r.status_of("properly-normalized"), Status::Fail);
}

// ---------------------------------------------------------------- induced_structure

TEST(InducedStructure, BlockFormRestrictsToItsFirstBlock) {
  const Chart c({"x1", "x2", "y1", "y2"});
  const Normalized n(c, {"y1", "y2"});
  const InducedStructure ind =
      induced_structure(graph_of_presymplectic(two_form(c, {{0, 1, "1"}, {2, 3, "1"}})), n, {});
  EXPECT_TRUE(ind.report.passed());
  const DiracFrame expected = graph_of_presymplectic(two_form(n.submanifold_chart(), {{0, 1, "1"}}));
  const auto fa = courant::fiber_at(ind.frame, {{"x1", 1}, {"x2", 2}});
  const auto fb = courant::fiber_at(expected, {{"x1", 1}, {"x2", 2}});
  EXPECT_TRUE(linalg::row_space_equal(fa.rows, fb.rows, 4));
}

TEST(InducedStructure, LinearPlaneBivectorInducesTheZeroBivector) {
  const InducedStructure ind = induced_structure(graph_of_poisson(x3_bivector()), x3_plane(), {});
  EXPECT_TRUE(ind.report.passed());
  ASSERT_EQ(ind.frame.sections.size(), 2U);
  for (const auto& s : ind.frame.sections) EXPECT_TRUE(s.vector.is_zero());
}

TEST(InducedStructure, SplitBivectorRestrictsToItsFirstBlock) {
  const InducedStructure ind = induced_structure(graph_of_poisson(split_bivector()), r4_plane(), {});
  EXPECT_TRUE(ind.report.passed());
  const Chart& sub = r4_plane().submanifold_chart();
  const DiracFrame expected = graph_of_poisson(bivector(sub, {{0, 1, "1"}}));
  const auto fa = courant::fiber_at(ind.frame, {{"x1", 0}, {"x2", 3}});
  const auto fb = courant::fiber_at(expected, {{"x1", 0}, {"x2", 3}});
  EXPECT_TRUE(linalg::row_space_equal(fa.rows, fb.rows, 4));
}

TEST(InducedStructure, RequiresProperNormalization) {
  EXPECT_THROW(induced_structure(graph_of_poisson(so3_bivector()), x3_plane(), {}), PreconditionError);
}

TEST(InducedStructure, ProperlyNormalizedCatalogHasEqualPullbackAndPushforward) {
  const std::vector<std::pair<DiracFrame, Normalized>> cases{
      {graph_of_poisson(x3_bivector()), x3_plane()},
      {graph_of_poisson(split_bivector()), r4_plane()},
      {graph_of_poisson(casimir_bivector()), r4_plane()},
      {graph_of_presymplectic(two_form(r4(), {{0, 1, "1 + x3^2"}, {2, 3, "1"}})), r4_plane()},
  };
  for (const auto& [l, n] : cases) {
    ASSERT_EQ(kernel_and_properness(l, n, {}).status_of("properly-normalized"), Status::Pass);
    const InducedStructure ind = induced_structure(l, n, {});
    EXPECT_EQ(ind.report.status_of("pullback-pushforward"), Status::Pass);
    EXPECT_EQ(ind.report.status_of("exact-sequence"), Status::Pass);
    EXPECT_TRUE(ind.report.passed());
  }
}

// ---------------------------------------------------------------- bracket_A

TEST(BracketA, LinearPlaneBivectorExample) {
  const DiracFrame l = graph_of_poisson(x3_bivector());
  const Section s1 = on(r3(), {"0", "0", "0"}, {"1", "0", "0"});
  const Section s2 = on(r3(), {"0", "0", "0"}, {"0", "1", "0"});
  for (Extension e : {Extension::Constant, Extension::Scaled}) {
    const Section br = bracket_A(l, x3_plane(), s1, s2, e);
    EXPECT_TRUE(br.equals(on(r3(), {"0", "0", "0"}, {"0", "0", "1"}))) << br.str();
  }
}

TEST(BracketA, SectionOutsideANThrows) {
  const DiracFrame l = graph_of_poisson(x3_bivector());
  const Section normal_vector = on(r3(), {"0", "0", "1"}, {"0", "0", "0"});
  const Section s = on(r3(), {"0", "0", "0"}, {"1", "0", "0"});
  EXPECT_THROW(bracket_A(l, x3_plane(), normal_vector, s, Extension::Constant), PreconditionError);
  // (d1, 0) is tangent but not in L.
  const Section not_in_l = on(r3(), {"1", "0", "0"}, {"0", "0", "0"});
  EXPECT_THROW(bracket_A(l, x3_plane(), not_in_l, s, Extension::Constant), PreconditionError);
}

TEST(BracketA, LeibnizAndIotaSharpOnTheCatalog) {
  struct Case {
    DiracFrame l;
    Normalized n;
    Section s;
    Section t;
  };
  const Chart& c4 = r4();
  const std::vector<Case> cases{
      {graph_of_poisson(x3_bivector()), x3_plane(), on(r3(), {"0", "0", "0"}, {"x2", "x1", "0"}),
       on(r3(), {"0", "0", "0"}, {"1", "x1^2", "3"})},
      {graph_of_poisson(casimir_bivector()), r4_plane(), on(c4, {"-x2", "x1", "0", "0"}, {"x1", "x2", "0", "0"}),
       on(c4, {"x1", "0", "0", "0"}, {"0", "-x1", "1", "0"})},
      {graph_of_poisson(split_bivector()), r4_plane(), on(c4, {"0", "x1", "0", "0"}, {"x1", "0", "0", "0"}),
       on(c4, {"x2", "0", "0", "0"}, {"0", "-x2", "0", "0"})},
  };
  for (const auto& k : cases) {
    const Expr f = k.n.chart().parse("1 + x1*x2");
    const Section lhs = bracket_A(k.l, k.n, k.s, k.t * f, Extension::Constant);
    const Section rhs = bracket_A(k.l, k.n, k.s, k.t, Extension::Constant) * f +
                        k.n.restrict(k.t) * cartan::apply(k.n.restrict(k.s).vector, f);
    EXPECT_TRUE(lhs.equals(rhs)) << (lhs - rhs).str();

    const Section scaled = bracket_A(k.l, k.n, k.s, k.t, Extension::Scaled);
    EXPECT_TRUE(scaled.equals(bracket_A(k.l, k.n, k.s, k.t, Extension::Constant)));

    // iota# is a morphism onto the bracket of the induced structure.
    const Section induced = courant::courant_bracket(iota_sharp(k.n, k.s), iota_sharp(k.n, k.t));
    EXPECT_TRUE(iota_sharp(k.n, bracket_A(k.l, k.n, k.s, k.t, Extension::Constant)).equals(induced));
  }
}

// ---------------------------------------------------------------- second fundamental form

TEST(SecondFundamentalForm, LinearPlaneBivectorBothRoutes) {
  const DiracFrame l = graph_of_poisson(x3_bivector());
  const Section s1 = on(r3(), {"0", "0", "0"}, {"1", "0", "0"});
  const Section s2 = on(r3(), {"0", "0", "0"}, {"0", "1", "0"});
  const SecondFundamentalForm b = second_fundamental_form(l, x3_plane(), s1, s2, {});
  EXPECT_TRUE(b.report.passed());
  EXPECT_TRUE(b.gauss[2].equals(Expr(1)));
  EXPECT_TRUE(b.direct[2].equals(Expr(1)));
  ASSERT_TRUE(b.poisson.has_value());
  EXPECT_TRUE((*b.poisson)[2].equals(Expr(-1)));
}

TEST(SecondFundamentalForm, ConstantBivectorsVanish) {
  const DiracFrame l = graph_of_poisson(split_bivector());
  const Chart& c = r4();
  const Section s1 = on(c, {"0", "1", "0", "0"}, {"1", "0", "0", "0"});
  const Section s2 = on(c, {"-x1", "0", "0", "0"}, {"0", "x1", "0", "0"});
  const SecondFundamentalForm b = second_fundamental_form(l, r4_plane(), s1, s2, {});
  EXPECT_TRUE(b.report.passed());
  EXPECT_TRUE(b.gauss.is_zero());
  EXPECT_TRUE(b.direct.is_zero());
}

TEST(SecondFundamentalForm, RoutesAgreeOnCasimirBivector) {
  const DiracFrame l = graph_of_poisson(casimir_bivector());
  const Chart& c = r4();
  const Section s1 = on(c, {"0", "(1 + x3)*x2", "0", "0"}, {"x2", "0", "0", "0"});
  const Section s2 = on(c, {"-(1 + x3)*x1^2", "0", "0", "0"}, {"0", "x1^2", "0", "0"});
  const SecondFundamentalForm b = second_fundamental_form(l, r4_plane(), s1, s2, {});
  EXPECT_TRUE(b.report.passed());
  EXPECT_TRUE(b.gauss[2].equals(c.parse("x2*x1^2")));
  EXPECT_TRUE(b.gauss[3].is_zero());
}

// ---------------------------------------------------------------- cosymplectic

TEST(Cosymplectic, SplitBivectorIsCosymplecticAndTotallyDirac) {
  const Report r = cosymplectic_verdicts(graph_of_poisson(split_bivector()), r4_plane(), {});
  EXPECT_EQ(r.status_of("cosymplectic"), Status::Pass);
  EXPECT_EQ(r.status_of("totally-dirac"), Status::Pass);
}

TEST(Cosymplectic, LinearPlaneBivectorIsNeither) {
  const Report r = cosymplectic_verdicts(graph_of_poisson(x3_bivector()), x3_plane(), {});
  EXPECT_EQ(r.status_of("cosymplectic"), Status::Fail);
  EXPECT_EQ(r.status_of("totally-dirac"), Status::Fail);
  EXPECT_EQ(r.status_of("properly-normalized"), Status::Pass);
}

TEST(Cosymplectic, SymplecticSubspaceIsTotallyDirac) {
  const Report r =
      cosymplectic_verdicts(graph_of_presymplectic(two_form(r4(), {{0, 1, "1"}, {2, 3, "1"}})), r4_plane(), {});
  EXPECT_EQ(r.status_of("totally-dirac"), Status::Pass);
}

TEST(Cosymplectic, CosymplecticImpliesVanishingSecondFundamentalForm) {
  const std::vector<std::pair<DiracFrame, Normalized>> cases{
      {graph_of_poisson(split_bivector()), r4_plane()},
      {graph_of_poisson(bivector(r4(), {{0, 1, "1 + x1^2"}, {2, 3, "1"}})), r4_plane()},
      {graph_of_poisson(bivector(r4(), {{0, 1, "1 + x1^2 + x2^2"}, {2, 3, "1 + x3^2"}})), r4_plane()},
      {graph_of_poisson(casimir_bivector()), r4_plane()},
      {graph_of_poisson(x3_bivector()), x3_plane()},
  };
  int cosymplectic = 0;
  for (const auto& [l, n] : cases) {
    ASSERT_TRUE(courant::check_dirac(l, {}).passed()) << l.bivector->str();
    const Report r = cosymplectic_verdicts(l, n, {});
    if (r.status_of("cosymplectic") == Status::Pass) {
      ++cosymplectic;
      EXPECT_EQ(r.status_of("totally-dirac"), Status::Pass) << l.bivector->str();
    }
  }
  EXPECT_GE(cosymplectic, 2);
}

// ---------------------------------------------------------------- contravariant derivative

TEST(ContravariantDerivative, ConstantBivectorEuclideanVanishes) {
  const Metric g = Metric::euclidean(r4());
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) {
      EXPECT_TRUE(contravariant_derivative(split_bivector(), g, cartan::dx(r4(), i), cartan::dx(r4(), j)).is_zero());
    }
  }
}

TEST(ContravariantDerivative, LinearPlaneBivectorExample) {
  const Metric g = Metric::euclidean(r3());
  const Form d12 = contravariant_derivative(x3_bivector(), g, cartan::dx(r3(), 0), cartan::dx(r3(), 1));
  const Form d21 = contravariant_derivative(x3_bivector(), g, cartan::dx(r3(), 1), cartan::dx(r3(), 0));
  EXPECT_TRUE(d12[2].equals(Expr(1) / Expr(2)));
  EXPECT_TRUE((d12 - d21).equals(cartan::dx(r3(), 2)));
}

TEST(ContravariantDerivative, CompatibleAndTorsionFreeOnTheCatalog) {
  const Chart& c3 = r3();
  auto e = [&](const std::string& s) { return c3.parse(s); };
  // U^T U with U unitriangular: determinant 1.
  const Metric bumpy(c3, {{e("1"), e("x3"), e("0")}, {e("x3"), e("1 + x3^2"), e("x1")}, {e("0"), e("x1"), e("1 + x1^2")}});
  const std::vector<std::pair<Multivector, Metric>> cases{
      {so3_bivector(), Metric::euclidean(c3)},
      {so3_bivector(), bumpy},
      {x3_bivector(), bumpy},
      {casimir_bivector(), curved_metric()},
      {broken_bivector(), curved_metric()},
  };
  for (const auto& [p, g] : cases) {
    const Report r = check_contravariant_derivative(p, g, {});
    EXPECT_TRUE(r.passed()) << p.str();
  }
}

TEST(Metric, RejectsAsymmetricAndDegenerateMatrices) {
  auto e = [](const std::string& s) { return kPlane.parse(s); };
  EXPECT_THROW(Metric(kPlane, {{e("1"), e("x")}, {e("0"), e("1")}}), PreconditionError);
  EXPECT_THROW(Metric(kPlane, {{e("1"), e("1")}, {e("1"), e("1")}}), PreconditionError);
}

// ---------------------------------------------------------------- gauss_split

TEST(GaussSplit, ConstantBivectorHasNoSecondFundamentalForm) {
  const GaussSplit gs = gauss_split(split_bivector(), Metric::euclidean(r4()), r4_plane(), cartan::dx(r4(), 0),
                                    cartan::dx(r4(), 1), {});
  EXPECT_TRUE(gs.report.passed());
  EXPECT_TRUE(gs.psi.is_zero());
}

TEST(GaussSplit, LinearPlaneBivectorExample) {
  const GaussSplit gs = gauss_split(x3_bivector(), Metric::euclidean(r3()), x3_plane(), cartan::dx(r3(), 0),
                                    cartan::dx(r3(), 1), {});
  EXPECT_TRUE(gs.report.passed());
  EXPECT_TRUE(gs.d_pi.is_zero());
  EXPECT_TRUE(gs.psi[2].equals(Expr(1) / Expr(2)));
  EXPECT_TRUE(gs.b[2].equals(Expr(1)));
}

TEST(GaussSplit, IdentitiesHoldOnCurvedMetric) {
  const Chart& c = r4();
  const std::vector<std::pair<Form, Form>> pairs{
      {cartan::dx(c, 0), cartan::dx(c, 1)},
      {form1(c, {"x2", "1", "0", "0"}), form1(c, {"0", "x1^2", "0", "0"})},
  };
  for (const auto& [a, b] : pairs) {
    const GaussSplit gs = gauss_split(casimir_bivector(), curved_metric(), r4_plane(), a, b, {});
    EXPECT_TRUE(gs.report.passed()) << a.str() << " " << b.str();
  }
}

TEST(GaussSplit, RequiresOrthogonalNormalBundle) {
  const Chart& c = r3();
  auto e = [&](const std::string& s) { return c.parse(s); };
  const Metric tilted(c, {{e("1"), e("0"), e("1/2")}, {e("0"), e("1"), e("0")}, {e("1/2"), e("0"), e("1")}});
  EXPECT_THROW(gauss_split(x3_bivector(), tilted, x3_plane(), cartan::dx(c, 0), cartan::dx(c, 1), {}),
               PreconditionError);
}

TEST(GaussSplit, RequiresPoissonDirac) {
  EXPECT_THROW(gauss_split(so3_bivector(), Metric::euclidean(r3()), x3_plane(), cartan::dx(r3(), 0),
                           cartan::dx(r3(), 1), {}),
               PreconditionError);
}
