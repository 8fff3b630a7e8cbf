#include "dirac/courant.hpp"

#include <cmath>
#include <set>

#include "dirac/errors.hpp"

namespace dirac::courant {

namespace {

void require_same_chart(const Chart& a, const Chart& b) {
  if (!(a == b)) throw ChartMismatchError();
}

// Exact value where possible; transcendental coefficients are evaluated in
// double precision and converted exactly, clearing `exact`.
Scalar value_at(const Expr& e, const ExactPoint& p, bool& exact) {
  if (!e.has_transcendental()) return expr::evaluate(e, p);
  const double v = expr::evaluate(e, expr::to_float(p));
  if (!std::isfinite(v)) throw EvalError(EvalError::Kind::DivisionByZero, "singular point");
  exact = false;
  return Scalar(v);
}

bool regular_at(const std::vector<Expr>& exprs, const ExactPoint& p) {
  bool exact = true;
  try {
    for (const auto& e : exprs) value_at(e, p, exact);
  } catch (const EvalError&) {
    return false;
  }
  return true;
}

QVector fiber_vector_flag(const Section& s, const ExactPoint& p, bool& exact) {
  const int n = s.chart().n();
  QVector v(static_cast<std::size_t>(2 * n));
  for (int i = 0; i < n; ++i) {
    v[static_cast<std::size_t>(i)] = value_at(s.vector[i], p, exact);
    v[static_cast<std::size_t>(n + i)] = value_at(s.form[i], p, exact);
  }
  return v;
}

std::string pair_label(std::size_t i, std::size_t j) {
  return "l" + std::to_string(i + 1) + ",l" + std::to_string(j + 1);
}

// Fiber pairing 2g of two vectors of length 2n.
Scalar fiber_g2(const QVector& a, const QVector& b, int n) {
  Scalar s = 0;
  for (int i = 0; i < n; ++i) {
    s += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(n + i)];
    s += b[static_cast<std::size_t>(i)] * a[static_cast<std::size_t>(n + i)];
  }
  return s;
}

template <class Tag>
void absorb_tensor(Check& c, const cartan::Alternating<Tag>& t, const SampleConfig& cfg, const Entries& context,
                   const std::string& label) {
  const cartan::TensorVerdict tv = cartan::classify_zero(t, cfg);
  std::string where = label;
  if (tv.component != 0) {
    where += "[";
    bool first = true;
    for (int i : cartan::mask_indices(tv.component)) {
      if (!first) where += ",";
      where += t.chart().name(i);
      first = false;
    }
    where += "]";
  }
  absorb(c, tv.verdict, context, where);
}

void absorb_section(Check& c, const Section& s, const SampleConfig& cfg, const Entries& context,
                    const std::string& label) {
  absorb_tensor(c, s.vector, cfg, context, label + ".vector");
  absorb_tensor(c, s.form, cfg, context, label + ".form");
}

Check make_check(const std::string& id, const std::string& anchor) {
  Check c;
  c.id = id;
  c.anchor = anchor;
  return c;
}

}  // namespace

// ---------------------------------------------------------------- Section

Section::Section(Multivector x, Form a) : vector(std::move(x)), form(std::move(a)) {
  require_same_chart(vector.chart(), form.chart());
  if (vector.degree() != 1 || form.degree() != 1) throw DegreeError("a section is a vector field and a 1-form");
}

Section Section::zero(const Chart& chart) { return {Multivector(chart, 1), Form(chart, 1)}; }

Section Section::operator+(const Section& o) const { return {vector + o.vector, form + o.form}; }
Section Section::operator-(const Section& o) const { return {vector - o.vector, form - o.form}; }
Section Section::operator-() const { return {-vector, -form}; }
Section Section::operator*(const Expr& f) const { return {vector * f, form * f}; }

bool Section::equals(const Section& o) const { return vector.equals(o.vector) && form.equals(o.form); }

std::string Section::str() const { return "(" + vector.str() + ", " + form.str() + ")"; }

Pairing pairing(const Section& a, const Section& b) {
  require_same_chart(a.chart(), b.chart());
  const Expr bx = cartan::contract(b.form, a.vector);
  const Expr ay = cartan::contract(a.form, b.vector);
  const Expr half = Expr(Scalar(1, 2));
  return {half * (bx + ay), half * (ay - bx)};
}

Expr g(const Section& a, const Section& b) { return pairing(a, b).g; }

Section courant_bracket(const Section& a, const Section& b) {
  const Pairing pr = pairing(a, b);
  Multivector x = cartan::lie_bracket(a.vector, b.vector);
  Form w = cartan::lie_derivative(a.vector, b.form) - cartan::lie_derivative(b.vector, a.form) +
           cartan::differential(a.chart(), pr.omega);
  return {x, w};
}

Section partial_f(const Chart& chart, const Expr& f) { return {Multivector(chart, 1), cartan::differential(chart, f)}; }

Section substitute(const Section& s, const std::map<std::string, Expr>& repl) {
  return {cartan::substitute(s.vector, repl), cartan::substitute(s.form, repl)};
}

std::string to_string(Origin o) {
  switch (o) {
    case Origin::Frame:
      return "frame";
    case Origin::Poisson:
      return "graph of bivector";
    case Origin::Presymplectic:
      return "graph of 2-form";
    case Origin::Reconstructed:
      return "reconstructed from geometric data";
    case Origin::Linearized:
      return "linearized along a leaf";
  }
  return "frame";
}

std::vector<Expr> DiracFrame::coefficients() const {
  std::vector<Expr> out;
  for (const auto& s : sections) {
    for (const auto& [m, v] : s.vector.components()) out.push_back(v);
    for (const auto& [m, v] : s.form.components()) out.push_back(v);
  }
  return out;
}

DiracFrame frame_of(const Chart& chart, std::vector<Section> sections) {
  for (const auto& s : sections) require_same_chart(chart, s.chart());
  DiracFrame l;
  l.chart = chart;
  l.sections = std::move(sections);
  return l;
}

DiracFrame graph_of_poisson(const Multivector& p) {
  if (p.degree() != 2) throw DegreeError("graph_of expects a bivector");
  const Chart& chart = p.chart();
  std::vector<Section> sections;
  for (int i = 0; i < chart.n(); ++i) {
    const Form a = cartan::dx(chart, i);
    sections.emplace_back(cartan::sharp(p, a), a);
  }
  DiracFrame l = frame_of(chart, std::move(sections));
  l.origin = Origin::Poisson;
  l.bivector = p;
  return l;
}

DiracFrame graph_of_presymplectic(const Form& tau) {
  if (tau.degree() != 2) throw DegreeError("graph_of expects a 2-form");
  const Chart& chart = tau.chart();
  std::vector<Section> sections;
  for (int i = 0; i < chart.n(); ++i) {
    const Multivector x = cartan::partial(chart, i);
    sections.emplace_back(x, cartan::flat(tau, x));
  }
  DiracFrame l = frame_of(chart, std::move(sections));
  l.origin = Origin::Presymplectic;
  l.two_form = tau;
  return l;
}

// ---------------------------------------------------------------- points

PointSet sample_points(const Chart& chart, const std::vector<Expr>& must_be_regular, const SampleConfig& cfg,
                       const std::map<std::string, Scalar>& fixed, bool grid, std::uint64_t stream) {
  std::vector<std::string> free;
  for (const auto& c : chart.coords()) {
    if (fixed.count(c) == 0) free.push_back(c);
  }
  PointSet out;
  auto with_fixed = [&](ExactPoint p) {
    for (const auto& [k, v] : fixed) p[k] = v;
    return p;
  };
  constexpr std::size_t kMaxGridCoords = 6;
  if (grid && free.size() <= kMaxGridCoords) {
    std::size_t total = 1;
    for (std::size_t i = 0; i < free.size(); ++i) total *= 3;
    const Scalar levels[3] = {-cfg.box, Scalar(0), cfg.box};
    for (std::size_t code = 0; code < total; ++code) {
      ExactPoint p;
      std::size_t c = code;
      for (const auto& name : free) {
        p[name] = levels[c % 3];
        c /= 3;
      }
      p = with_fixed(std::move(p));
      if (regular_at(must_be_regular, p)) out.points.push_back(std::move(p));
    }
  }
  expr::PointSampler sampler(cfg, stream);
  int accepted = 0;
  int retries = 0;
  while (accepted < cfg.count) {
    ExactPoint p = with_fixed(sampler.next(free));
    if (!regular_at(must_be_regular, p)) {
      if (++retries > cfg.max_retries) {
        out.exhausted = true;
        break;
      }
      continue;
    }
    out.points.push_back(std::move(p));
    ++accepted;
  }
  return out;
}

QVector fiber_vector(const Section& s, const ExactPoint& p) {
  bool exact = true;
  return fiber_vector_flag(s, p, exact);
}

PointSubspace fiber_at(const DiracFrame& l, const ExactPoint& p) {
  PointSubspace out;
  out.point = p;
  out.n = l.chart.n();
  QMatrix m;
  try {
    for (const auto& s : l.sections) m.push_back(fiber_vector_flag(s, p, out.exact));
  } catch (const EvalError& e) {
    throw PreconditionError(std::string("frame is singular at the point: ") + e.what());
  }
  out.rows = linalg::row_basis(m, static_cast<std::size_t>(2 * out.n));
  return out;
}

bool is_maximal_isotropic(const PointSubspace& s) {
  if (static_cast<int>(s.rows.size()) != s.n) return false;
  for (std::size_t i = 0; i < s.rows.size(); ++i) {
    for (std::size_t j = i; j < s.rows.size(); ++j) {
      if (fiber_g2(s.rows[i], s.rows[j], s.n) != 0) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------- verdicts

Report check_almost_dirac(const DiracFrame& l, const SampleConfig& cfg) {
  Report r;
  const int n = l.chart.n();
  Check size = make_check("frame-size", "the frame has one section per coordinate");
  if (static_cast<int>(l.sections.size()) != n) {
    size.status = Status::Fail;
    size.note = std::to_string(l.sections.size()) + " sections for " + std::to_string(n) + " coordinates";
    r.add(size);
    return r;
  }
  r.add(size);

  Check iso = make_check("isotropy", "g(l_i, l_j) = 0 for all frame pairs");
  for (std::size_t i = 0; i < l.sections.size(); ++i) {
    for (std::size_t j = i; j < l.sections.size(); ++j) {
      absorb(iso, expr::classify_zero(g(l.sections[i], l.sections[j]), cfg), {{"pair", pair_label(i, j)}}, "g");
    }
  }
  r.add(iso);

  Check rank = make_check("rank", "the frame has rank n at every sample point");
  const PointSet pts = sample_points(l.chart, l.coefficients(), cfg);
  for (const auto& p : pts.points) {
    const PointSubspace s = fiber_at(l, p);
    if (!s.exact) rank.exact = false;
    if (static_cast<int>(s.rows.size()) != n) {
      if (rank.status != Status::Fail) rank.status = Status::Fail;
      if (rank.witnesses.size() < 4) {
        rank.witnesses.push_back({point_entries(p), {{"rank", std::to_string(s.rows.size())}}});
      }
    }
  }
  if (pts.exhausted && rank.status == Status::Pass) {
    rank.status = Status::Unknown;
    rank.note = "too many singular sample points";
  }
  r.add(rank);
  return r;
}

Report check_dirac(const DiracFrame& l, const SampleConfig& cfg) {
  Report r = check_almost_dirac(l, cfg);
  Check closure = make_check("closure", "g([l_i, l_j], l_k) = 0 for i < j and all k");
  if (r.status() == Status::Fail || r.status() == Status::Invalid) {
    closure.status = Status::Invalid;
    closure.note = "not an almost Dirac structure";
    r.add(closure);
    return r;
  }
  const auto& s = l.sections;
  for (std::size_t i = 0; i < s.size(); ++i) {
    for (std::size_t j = i + 1; j < s.size(); ++j) {
      const Section b = courant_bracket(s[i], s[j]);
      for (std::size_t k = 0; k < s.size(); ++k) {
        const std::string triple =
            "l" + std::to_string(i + 1) + ",l" + std::to_string(j + 1) + ",l" + std::to_string(k + 1);
        absorb(closure, expr::classify_zero(g(b, s[k]), cfg), {{"triple", triple}}, "g([li,lj],lk)");
      }
    }
  }
  r.add(closure);
  return r;
}

Report check_courant_axioms(const std::vector<Section>& sections, const Expr& f, const SampleConfig& cfg) {
  if (sections.size() < 3) throw PreconditionError("the axiom checks need at least three sections");
  const Chart& chart = sections.front().chart();
  for (const auto& s : sections) require_same_chart(chart, s.chart());
  const std::size_t m = sections.size();
  const Expr third = Expr(Scalar(1, 3));
  const Expr half = Expr(Scalar(1, 2));

  std::vector<std::vector<Section>> br(m, std::vector<Section>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) br[i][j] = courant_bracket(sections[i], sections[j]);
  }
  auto idx = [](std::size_t i) { return std::to_string(i + 1); };

  Report r;
  Check anchor = make_check("anchor", "rho [c1, c2] = [rho c1, rho c2]");
  Check skew = make_check("antisymmetry", "[c1, c2] + [c2, c1] = 0");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const Entries ctx = {{"pair", "c" + idx(i) + ",c" + idx(j)}};
      absorb_tensor(anchor, br[i][j].vector - cartan::lie_bracket(sections[i].vector, sections[j].vector), cfg, ctx,
                    "residual");
      if (i < j) absorb_section(skew, br[i][j] + br[j][i], cfg, ctx, "residual");
    }
  }

  Check jacobi = make_check("jacobi-anomaly", "sum_cycl [[c1,c2],c3] = (1/3) partial sum_cycl g([c1,c2],c3)");
  Check inv = make_check("metric-invariance",
                         "(rho c) g(c1,c2) = g([c,c1] + partial g(c,c1), c2) + g(c1, [c,c2] + partial g(c,c2))");
  for (std::size_t a = 0; a < m; ++a) {
    for (std::size_t b = a + 1; b < m; ++b) {
      for (std::size_t c = b + 1; c < m; ++c) {
        const Entries ctx = {{"triple", "c" + idx(a) + ",c" + idx(b) + ",c" + idx(c)}};
        const Section lhs = courant_bracket(br[a][b], sections[c]) + courant_bracket(br[b][c], sections[a]) +
                            courant_bracket(br[c][a], sections[b]);
        const Expr t = g(br[a][b], sections[c]) + g(br[b][c], sections[a]) + g(br[c][a], sections[b]);
        absorb_section(jacobi, lhs - partial_f(chart, t) * third, cfg, ctx, "residual");
      }
    }
  }
  for (std::size_t c = 0; c < m; ++c) {
    for (std::size_t a = 0; a < m; ++a) {
      for (std::size_t b = a; b < m; ++b) {
        const Entries ctx = {{"triple", "c" + idx(c) + ";c" + idx(a) + ",c" + idx(b)}};
        const Section& s = sections[c];
        const Section& s1 = sections[a];
        const Section& s2 = sections[b];
        const Expr lhs = cartan::apply(s.vector, g(s1, s2));
        const Section t1 = br[c][a] + partial_f(chart, g(s, s1));
        const Section t2 = br[c][b] + partial_f(chart, g(s, s2));
        absorb(inv, expr::classify_zero(lhs - g(t1, s2) - g(s1, t2), cfg), ctx, "residual");
      }
    }
  }

  Check dpair = make_check("partial-pairing", "g(c, partial f) = (rho c) f / 2 and rho partial f = 0");
  const Section df = partial_f(chart, f);
  absorb_tensor(dpair, df.vector, cfg, {{"term", "rho partial f"}}, "residual");
  for (std::size_t i = 0; i < m; ++i) {
    absorb(dpair, expr::classify_zero(g(sections[i], df) - half * cartan::apply(sections[i].vector, f), cfg),
           {{"section", "c" + idx(i)}}, "residual");
  }

  Check leibniz = make_check("leibniz", "[c1, f c2] = f [c1, c2] + ((rho c1) f) c2 - g(c1, c2) partial f");
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const Section lhs = courant_bracket(sections[i], sections[j] * f);
      const Section rhs = br[i][j] * f + sections[j] * cartan::apply(sections[i].vector, f) -
                          df * g(sections[i], sections[j]);
      absorb_section(leibniz, lhs - rhs, cfg, {{"pair", "c" + idx(i) + ",c" + idx(j)}}, "residual");
    }
  }

  r.add(anchor);
  r.add(skew);
  r.add(jacobi);
  r.add(inv);
  r.add(dpair);
  r.add(leibniz);
  return r;
}

// ---------------------------------------------------------------- pointwise data

CharacteristicData characteristic_data_at(const DiracFrame& l, const ExactPoint& p) {
  const PointSubspace lp = fiber_at(l, p);
  const int n = lp.n;
  const auto nn = static_cast<std::size_t>(n);
  const std::size_t r = lp.rows.size();
  CharacteristicData out;

  QMatrix tangent;
  for (const auto& row : lp.rows) tangent.emplace_back(row.begin(), row.begin() + n);
  out.l_plus = linalg::rref(tangent, nn).rows;

  // Columns of `vec_part` are the tangent parts of the rows of L_p.
  QMatrix vec_part(nn, QVector(r));
  for (std::size_t k = 0; k < r; ++k) {
    for (std::size_t i = 0; i < nn; ++i) vec_part[i][k] = lp.rows[k][i];
  }
  std::vector<QVector> lifts;
  for (const auto& b : out.l_plus) {
    const auto c = linalg::solve(vec_part, b, r);
    if (!c) throw Error("internal: tangent projection does not lift");
    QVector form(nn);
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t i = 0; i < nn; ++i) form[i] += (*c)[k] * lp.rows[k][nn + i];
    }
    lifts.push_back(std::move(form));
  }
  const std::size_t d = out.l_plus.size();
  out.omega_plus.assign(d, QVector(d));
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      Scalar s = 0;
      for (std::size_t k = 0; k < nn; ++k) s += lifts[i][k] * out.l_plus[j][k];
      out.omega_plus[i][j] = s;
    }
  }
  out.omega_rank = linalg::rank(out.omega_plus, d);

  // L cap TM: combinations whose form part vanishes, and dually for L cap T*M.
  QMatrix form_zero;
  QMatrix vector_zero;
  for (std::size_t i = 0; i < nn; ++i) {
    QVector a(2 * nn);
    QVector b(2 * nn);
    a[nn + i] = 1;
    b[i] = 1;
    form_zero.push_back(a);
    vector_zero.push_back(b);
  }
  for (const auto& row : linalg::restrict_span(lp.rows, form_zero, 2 * nn)) {
    out.kernel.emplace_back(row.begin(), row.begin() + n);
  }
  for (const auto& row : linalg::restrict_span(lp.rows, vector_zero, 2 * nn)) {
    out.conormal.emplace_back(row.begin() + n, row.end());
  }
  return out;
}

DWBasis dw_basis_at(const PointSubspace& lp, const std::vector<int>& tangent) {
  if (!is_maximal_isotropic(lp)) throw PreconditionError("the subspace is not maximal isotropic");
  const int n = lp.n;
  const auto nn = static_cast<std::size_t>(n);
  std::set<int> tset(tangent.begin(), tangent.end());
  if (tset.size() != tangent.size()) throw PreconditionError("repeated tangent index");
  DWBasis out;
  out.tangent = tangent;
  for (int i = 0; i < n; ++i) {
    if (tset.count(i) == 0) out.complement.push_back(i);
  }
  for (int i : tangent) {
    if (i < 0 || i >= n) throw PreconditionError("tangent index out of range");
  }
  const std::size_t r = lp.rows.size();
  // Equations: X^v (v tangent) and theta_b (b in the complement) of sum c_k row_k.
  QMatrix eqs;
  for (int v : out.tangent) {
    QVector row(r);
    for (std::size_t k = 0; k < r; ++k) row[k] = lp.rows[k][static_cast<std::size_t>(v)];
    eqs.push_back(row);
  }
  for (int b : out.complement) {
    QVector row(r);
    for (std::size_t k = 0; k < r; ++k) row[k] = lp.rows[k][nn + static_cast<std::size_t>(b)];
    eqs.push_back(row);
  }
  if (linalg::rank(eqs, r) != n) {
    throw PreconditionError("the subspace is not transverse to the chosen complement");
  }
  auto element = [&](const QVector& rhs) {
    const auto c = linalg::solve(eqs, rhs, r);
    if (!c) throw Error("internal: DW system inconsistent");
    QVector e(2 * nn);
    for (std::size_t k = 0; k < r; ++k) {
      for (std::size_t i = 0; i < 2 * nn; ++i) e[i] += (*c)[k] * lp.rows[k][i];
    }
    return e;
  };
  const std::size_t q = out.tangent.size();
  const std::size_t pc = out.complement.size();
  out.a.assign(pc, QVector(q));
  out.alpha.assign(q, QVector(q));
  out.b.assign(pc, QVector(pc));
  for (std::size_t u = 0; u < q; ++u) {
    QVector rhs(nn);
    rhs[u] = 1;
    const QVector e = element(rhs);
    for (std::size_t b = 0; b < pc; ++b) out.a[b][u] = e[static_cast<std::size_t>(out.complement[b])];
    for (std::size_t v = 0; v < q; ++v) out.alpha[u][v] = e[nn + static_cast<std::size_t>(out.tangent[v])];
    out.rows.push_back(e);
  }
  for (std::size_t a = 0; a < pc; ++a) {
    QVector rhs(nn);
    rhs[q + a] = 1;
    const QVector e = element(rhs);
    for (std::size_t b = 0; b < pc; ++b) out.b[a][b] = e[static_cast<std::size_t>(out.complement[b])];
    for (std::size_t v = 0; v < q; ++v) {
      if (e[nn + static_cast<std::size_t>(out.tangent[v])] != -out.a[a][v]) {
        throw Error("internal: DW basis mixed block is inconsistent");
      }
    }
    out.rows.push_back(e);
  }
  for (std::size_t i = 0; i < q; ++i) {
    for (std::size_t j = 0; j < q; ++j) {
      if (out.alpha[i][j] != -out.alpha[j][i]) throw Error("internal: alpha is not antisymmetric");
    }
  }
  for (std::size_t i = 0; i < pc; ++i) {
    for (std::size_t j = 0; j < pc; ++j) {
      if (out.b[i][j] != -out.b[j][i]) throw Error("internal: B is not antisymmetric");
    }
  }
  return out;
}

Report check_leaf_parity(const DiracFrame& l, const SampleConfig& cfg) {
  Report r;
  Check c = make_check("leaf-parity", "dim L+ has the same parity at all sample points");
  const PointSet pts = sample_points(l.chart, l.coefficients(), cfg);
  int parity = -1;
  Entries first_point;
  std::string first_dim;
  for (const auto& p : pts.points) {
    const CharacteristicData cd = characteristic_data_at(l, p);
    const int dim = static_cast<int>(cd.l_plus.size());
    if (parity < 0) {
      parity = dim % 2;
      first_point = point_entries(p);
      first_dim = std::to_string(dim);
    } else if (dim % 2 != parity && c.status == Status::Pass) {
      c.status = Status::Fail;
      c.witnesses.push_back({first_point, {{"dim", first_dim}}});
      c.witnesses.push_back({point_entries(p), {{"dim", std::to_string(dim)}}});
    }
  }
  if (pts.exhausted && c.status == Status::Pass) {
    c.status = Status::Unknown;
    c.note = "too many singular sample points";
  }
  r.add(c);
  return r;
}

}  // namespace dirac::courant
