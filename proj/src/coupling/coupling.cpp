#include "dirac/coupling.hpp"

#include "dirac/errors.hpp"
#include "dirac/linalg.hpp"

namespace dirac::coupling {

using cartan::Mask;
using linalg::QMatrix;
using linalg::QVector;

namespace {

Check make_check(const std::string& id, const std::string& anchor) {
  Check c;
  c.id = id;
  c.anchor = anchor;
  return c;
}

std::string names(const Chart& c, std::initializer_list<int> idx) {
  std::string out;
  for (int i : idx) {
    if (!out.empty()) out += ",";
    out += c.name(i);
  }
  return out;
}

template <class Tag>
void absorb_tensor(Check& c, const cartan::Alternating<Tag>& t, const SampleConfig& cfg, const Entries& context) {
  const cartan::TensorVerdict tv = cartan::classify_zero(t, cfg);
  std::string label = "component";
  if (tv.component != 0) {
    label += "[";
    bool first = true;
    for (int i : cartan::mask_indices(tv.component)) {
      if (!first) label += ",";
      label += t.chart().name(i);
      first = false;
    }
    label += "]";
  }
  absorb(c, tv.verdict, context, label);
}

// Rows (length 2n) spanning the sub-space of L_p cut out by vanishing of the
// listed fiber coordinates.
QMatrix cut(const QMatrix& rows, int n, const std::vector<int>& fiber_coords) {
  QMatrix constraints;
  for (int k : fiber_coords) {
    QVector c(static_cast<std::size_t>(2 * n));
    c[static_cast<std::size_t>(k)] = 1;
    constraints.push_back(c);
  }
  return linalg::restrict_span(rows, constraints, static_cast<std::size_t>(2 * n));
}

QMatrix tangent_parts(const QMatrix& rows, int n) {
  QMatrix out;
  for (const auto& r : rows) out.emplace_back(r.begin(), r.begin() + n);
  return out;
}

QMatrix form_parts(const QMatrix& rows, int n) {
  QMatrix out;
  for (const auto& r : rows) out.emplace_back(r.begin() + n, r.end());
  return out;
}

QVector unit(int n, int i) {
  QVector v(static_cast<std::size_t>(n));
  v[static_cast<std::size_t>(i)] = 1;
  return v;
}

// Fiber coordinates killed by F + ann F: X^u (transverse u) and theta_a (leaf a).
std::vector<int> f_plus_ann_f(const Chart& c) {
  std::vector<int> out;
  for (int u : c.transverse()) out.push_back(u);
  for (int a : c.leaf()) out.push_back(c.n() + a);
  return out;
}

// The matrix M[j][i] = X_i^j (j transverse) or theta_{i,j} (j leaf); L is
// coupling exactly where it is invertible, and column j of its inverse gives
// the element of L with X^u = delta_uj, theta_a = delta_aj.
linalg::EMatrix coupling_matrix(const DiracFrame& l) {
  const Chart& c = l.chart;
  const int n = c.n();
  linalg::EMatrix m(static_cast<std::size_t>(n), std::vector<Expr>(l.sections.size()));
  for (int j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < l.sections.size(); ++i) {
      m[static_cast<std::size_t>(j)][i] = c.is_leaf(j) ? l.sections[i].form[j] : l.sections[i].vector[j];
    }
  }
  return m;
}

// Elements e_j = sum_i inv[i][j] l_i.
std::vector<Section> solved_elements(const DiracFrame& l) {
  const auto inv = linalg::symbolic_inverse(coupling_matrix(l));
  if (!inv || l.sections.size() != static_cast<std::size_t>(l.chart.n())) {
    throw PreconditionError("the structure is not coupling: L cap (F + ann F) is nonzero");
  }
  std::vector<Section> out;
  for (int j = 0; j < l.chart.n(); ++j) {
    Section e = Section::zero(l.chart);
    for (std::size_t i = 0; i < l.sections.size(); ++i) {
      const Expr& coef = (*inv)[i][static_cast<std::size_t>(j)];
      if (!coef.is_zero()) e = e + l.sections[i] * coef;
    }
    out.push_back(e);
  }
  return out;
}

Report invalid_conditions(Report r, const std::vector<std::pair<std::string, std::string>>& ids,
                          const std::string& note) {
  for (const auto& [id, anchor] : ids) {
    Check c = make_check(id, anchor);
    c.status = Status::Invalid;
    c.note = note;
    r.add(c);
  }
  return r;
}

}  // namespace

GeometricData make_geometric_data(FrameSplit split, Form sigma, Multivector pi) {
  const Chart& c = split.chart();
  if (!(sigma.chart() == c) || !(pi.chart() == c)) throw ChartMismatchError();
  if (sigma.degree() != 2 || pi.degree() != 2) throw DegreeError("sigma is a 2-form and pi a bivector");
  for (const auto& [m, v] : sigma.components()) {
    for (int i : cartan::mask_indices(m)) {
      if (c.is_leaf(i)) throw PreconditionError("sigma must only involve transverse differentials");
    }
  }
  for (const auto& [m, v] : pi.components()) {
    for (int i : cartan::mask_indices(m)) {
      if (!c.is_leaf(i)) throw PreconditionError("pi must be tangent to the leaves");
    }
  }
  return {std::move(split), std::move(sigma), std::move(pi)};
}

Multivector multivector_part(const Multivector& p, const FrameSplit& split, int transverse, int leaf) {
  const Multivector comps = split.frame_components(p);
  Multivector keep(p.chart(), p.degree());
  for (const auto& [m, v] : comps.components()) {
    if (split.bidegree(m) == std::make_pair(transverse, leaf)) keep.set(m, v);
  }
  return split.assemble(keep);
}

Multivector project_to_leaf(const Multivector& z, const FrameSplit& split) {
  Multivector out = z;
  for (int u : split.chart().transverse()) out = out - split.horizontal(u) * z[u];
  return out;
}

// ---------------------------------------------------------------- pointwise

Report normal_distribution(const DiracFrame& l, const SampleConfig& cfg) {
  const Chart& c = l.chart;
  const int n = c.n();
  Report r;
  Check hc = make_check("h-complement", "H(L,F) is a complement of F at every sample point");
  Check dual = make_check("conormal-duality", "T*M = ann F + K* at every sample point");
  Table dims{"normal distribution", {}};

  std::vector<int> leaf_forms;
  for (int a : c.leaf()) leaf_forms.push_back(n + a);
  std::vector<int> transverse_vectors(c.transverse().begin(), c.transverse().end());
  QMatrix f_basis;
  for (int a : c.leaf()) f_basis.push_back(unit(n, a));
  QMatrix ann_f;
  for (int u : c.transverse()) ann_f.push_back(unit(n, u));

  const auto pts = courant::sample_points(c, l.coefficients(), cfg);
  for (std::size_t k = 0; k < pts.points.size(); ++k) {
    const auto& p = pts.points[k];
    const courant::PointSubspace lp = courant::fiber_at(l, p);
    const QMatrix h = linalg::row_basis(tangent_parts(cut(lp.rows, n, leaf_forms), n), static_cast<std::size_t>(n));
    const QMatrix kstar =
        linalg::row_basis(form_parts(cut(lp.rows, n, transverse_vectors), n), static_cast<std::size_t>(n));
    QMatrix hf = h;
    hf.insert(hf.end(), f_basis.begin(), f_basis.end());
    QMatrix ak = ann_f;
    ak.insert(ak.end(), kstar.begin(), kstar.end());
    const bool complement = static_cast<int>(h.size()) == c.q() && linalg::rank(hf, static_cast<std::size_t>(n)) == n;
    const bool duality =
        static_cast<int>(kstar.size()) == c.p() && linalg::rank(ak, static_cast<std::size_t>(n)) == n;
    dims.entries.emplace_back("point " + std::to_string(k + 1),
                              "dim H = " + std::to_string(h.size()) + ", dim K* = " + std::to_string(kstar.size()));
    if (!complement) {
      hc.status = Status::Fail;
      if (hc.witnesses.size() < 4) {
        hc.witnesses.push_back({point_entries(p), {{"dim H", std::to_string(h.size())},
                                                   {"dim H + F", std::to_string(linalg::rank(hf, static_cast<std::size_t>(n)))}}});
      }
    }
    if (!duality) {
      dual.status = Status::Fail;
      if (dual.witnesses.size() < 4) {
        dual.witnesses.push_back({point_entries(p), {{"dim K*", std::to_string(kstar.size())},
                                                     {"dim ann F + K*", std::to_string(linalg::rank(ak, static_cast<std::size_t>(n)))}}});
      }
    }
    if (k == 0) {
      Table basis{"H basis at point 1", {}};
      for (std::size_t i = 0; i < h.size(); ++i) {
        std::string row;
        for (const auto& x : h[i]) row += (row.empty() ? "" : " ") + expr::to_string(x);
        basis.entries.emplace_back("h" + std::to_string(i + 1), "[" + row + "]");
      }
      r.add_table(basis);
    }
  }
  if (pts.exhausted) {
    for (Check* ch : {&hc, &dual}) {
      if (ch->status == Status::Pass) {
        ch->status = Status::Unknown;
        ch->note = "too many singular sample points";
      }
    }
  }
  r.add(hc);
  r.add(dual);
  r.add_table(dims);
  return r;
}

Report is_coupling(const DiracFrame& l, const SampleConfig& cfg) {
  const Chart& c = l.chart;
  const int n = c.n();
  Report r;
  Check ch = make_check("coupling", "L cap (F + ann F) = 0 at every sample point");
  const auto pts = courant::sample_points(c, l.coefficients(), cfg);
  for (const auto& p : pts.points) {
    const courant::PointSubspace lp = courant::fiber_at(l, p);
    if (!lp.exact) ch.exact = false;
    const QMatrix meet = cut(lp.rows, n, f_plus_ann_f(c));
    if (static_cast<int>(lp.rows.size()) != n || !meet.empty()) {
      ch.status = Status::Fail;
      if (ch.witnesses.size() < 4) {
        ch.witnesses.push_back({point_entries(p), {{"dim L cap (F + ann F)", std::to_string(meet.size())},
                                                   {"rank L", std::to_string(lp.rows.size())}}});
      }
    }
  }
  if (pts.exhausted && ch.status == Status::Pass) {
    ch.status = Status::Unknown;
    ch.note = "too many singular sample points";
  }
  r.add(ch);
  if (ch.status == Status::Pass) {
    try {
      const FrameSplit split = normal_frame(l);
      Table t{"H frame", {}};
      for (int u : c.transverse()) {
        for (int a : c.leaf()) t.entries.emplace_back("A(" + names(c, {a, u}) + ")", split.a(a, u).str());
      }
      r.add_table(t);
    } catch (const PreconditionError& e) {
      Check f = make_check("h-frame", "the normal bundle has a differentiable frame");
      f.status = Status::Unknown;
      f.note = e.what();
      r.add(f);
    }
  }
  return r;
}

FrameSplit normal_frame(const DiracFrame& l) {
  const Chart& c = l.chart;
  const std::vector<Section> e = solved_elements(l);
  std::map<std::pair<int, int>, Expr> a;
  for (int u : c.transverse()) {
    for (int b : c.leaf()) a[{b, u}] = e[static_cast<std::size_t>(u)].vector[b];
  }
  return FrameSplit(c, a);
}

AlmostCouplingSplit decompose_almost_coupling(const DiracFrame& l, const FrameSplit& split, const SampleConfig& cfg) {
  const Chart& c = l.chart;
  if (!(split.chart() == c)) throw ChartMismatchError();
  AlmostCouplingSplit out;
  Check ch = make_check("almost-coupling", "L = (L cap (H + H*)) + (L cap (F + F*))");
  std::vector<Section> hs;
  std::vector<Section> fs;
  for (std::size_t i = 0; i < l.sections.size(); ++i) {
    const Section& s = l.sections[i];
    Multivector x(c, 1);
    for (int u : c.transverse()) x = x + split.horizontal(u) * s.vector[u];
    const Multivector y = s.vector - x;
    Form lam(c, 1);
    for (int a : c.leaf()) lam = lam + split.lambda(a) * s.form[a];
    const Form alpha = s.form - lam;
    hs.emplace_back(x, alpha);
    fs.emplace_back(y, lam);
    for (std::size_t k = 0; k < l.sections.size(); ++k) {
      const std::string pair = "l" + std::to_string(i + 1) + ",l" + std::to_string(k + 1);
      absorb(ch, expr::classify_zero(courant::g(hs.back(), l.sections[k]), cfg), {{"H part", pair}}, "g");
      absorb(ch, expr::classify_zero(courant::g(fs.back(), l.sections[k]), cfg), {{"F part", pair}}, "g");
    }
  }
  out.report.add(ch);

  // Greedy independent selection at the first regular sample point.
  SampleConfig one = cfg;
  one.count = 1;
  std::vector<Expr> coeffs = l.coefficients();
  for (const auto& s : hs) {
    for (const auto& [m, v] : s.vector.components()) coeffs.push_back(v);
    for (const auto& [m, v] : s.form.components()) coeffs.push_back(v);
  }
  const auto pts = courant::sample_points(c, coeffs, one);
  auto select = [&](const std::vector<Section>& parts) {
    if (pts.points.empty()) return parts;
    std::vector<Section> chosen;
    QMatrix rows;
    for (const auto& s : parts) {
      QMatrix trial = rows;
      trial.push_back(courant::fiber_vector(s, pts.points.front()));
      if (linalg::rank(trial, static_cast<std::size_t>(2 * c.n())) > static_cast<int>(rows.size())) {
        rows = std::move(trial);
        chosen.push_back(s);
      }
    }
    return chosen;
  };
  out.h_part = select(hs);
  out.f_part = select(fs);
  return out;
}

GeometricData extract_geometric_data(const DiracFrame& l, const SampleConfig& cfg) {
  const Report r = is_coupling(l, cfg);
  if (r.status_of("coupling") != Status::Pass) throw PreconditionError("the structure is not coupling");
  const Chart& c = l.chart;
  const std::vector<Section> e = solved_elements(l);
  std::map<std::pair<int, int>, Expr> a;
  Form sigma(c, 2);
  Multivector pi(c, 2);
  for (int u : c.transverse()) {
    const Section& eu = e[static_cast<std::size_t>(u)];
    for (int b : c.leaf()) a[{b, u}] = eu.vector[b];
    for (int v : c.transverse()) {
      if (v > u) sigma.set(Mask{1} << u | Mask{1} << v, eu.form[v]);
    }
  }
  for (int x : c.leaf()) {
    const Section& ea = e[static_cast<std::size_t>(x)];
    for (int b : c.leaf()) {
      if (b > x) pi.set(Mask{1} << x | Mask{1} << b, ea.vector[b]);
    }
  }
  return make_geometric_data(FrameSplit(c, a), sigma, pi);
}

DiracFrame reconstruct(const GeometricData& data) {
  const Chart& c = data.split.chart();
  std::vector<Section> s;
  for (int i = 0; i < c.n(); ++i) {
    if (c.is_leaf(i)) {
      const Form lam = data.split.lambda(i);
      s.emplace_back(cartan::sharp(data.pi, lam), lam);
    } else {
      const Multivector x = data.split.horizontal(i);
      s.emplace_back(x, cartan::flat(data.sigma, x));
    }
  }
  DiracFrame l = courant::frame_of(c, std::move(s));
  l.origin = courant::Origin::Reconstructed;
  return l;
}

// ---------------------------------------------------------------- integrability

Report check_integrability(const GeometricData& data, const SampleConfig& cfg) {
  const FrameSplit& split = data.split;
  const Chart& c = split.chart();
  const auto& tr = c.transverse();
  const auto& lf = c.leaf();
  Report r;

  Check c1 = make_check("cond-i", "Pi is Poisson on each leaf: [Pi,Pi](lambda^a, lambda^b, lambda^c) = 0");
  if (lf.size() < 3) {
    c1.note = "vacuous: leaves have dimension < 3";
  } else {
    const Multivector s = cartan::schouten_bracket(data.pi, data.pi);
    for (std::size_t i = 0; i < lf.size(); ++i)
      for (std::size_t j = i + 1; j < lf.size(); ++j)
        for (std::size_t k = j + 1; k < lf.size(); ++k) {
          const Expr v = cartan::evaluate_multivector(
              s, {split.lambda(lf[i]), split.lambda(lf[j]), split.lambda(lf[k])});
          absorb(c1, expr::classify_zero(v, cfg), {{"leaf indices", names(c, {lf[i], lf[j], lf[k]})}}, "value");
        }
  }
  r.add(c1);

  Check c2 = make_check("cond-ii", "d sigma(X_u, X_v, X_w) = 0");
  if (tr.size() < 3) {
    c2.note = "vacuous: fewer than three transverse directions";
  } else {
    const Form ds = cartan::ext_d(data.sigma);
    for (std::size_t i = 0; i < tr.size(); ++i)
      for (std::size_t j = i + 1; j < tr.size(); ++j)
        for (std::size_t k = j + 1; k < tr.size(); ++k) {
          const Expr v =
              cartan::evaluate_form(ds, {split.horizontal(tr[i]), split.horizontal(tr[j]), split.horizontal(tr[k])});
          absorb(c2, expr::classify_zero(v, cfg), {{"transverse indices", names(c, {tr[i], tr[j], tr[k]})}}, "value");
        }
  }
  r.add(c2);

  Check c3 = make_check("cond-iii", "pr_F [X_u, X_v] = sharp_Pi d''(sigma(X_u, X_v))");
  for (std::size_t i = 0; i < tr.size(); ++i)
    for (std::size_t j = i + 1; j < tr.size(); ++j) {
      const Multivector xu = split.horizontal(tr[i]);
      const Multivector xv = split.horizontal(tr[j]);
      const Multivector lhs = project_to_leaf(cartan::lie_bracket(xu, xv), split);
      const Expr s = cartan::evaluate_form(data.sigma, {xu, xv});
      Form dpp(c, 1);
      for (int a : lf) dpp = dpp + split.lambda(a) * expr::differentiate(s, c.name(a));
      absorb_tensor(c3, lhs - cartan::sharp(data.pi, dpp), cfg, {{"transverse indices", names(c, {tr[i], tr[j]})}});
    }
  r.add(c3);

  Check c4 = make_check("cond-iv", "L_{X_u} Pi = 0");
  for (int u : tr) {
    absorb_tensor(c4, cartan::lie_derivative(split.horizontal(u), data.pi), cfg, {{"transverse index", c.name(u)}});
  }
  r.add(c4);
  return r;
}

Report check_integrability_almost_coupling(const DiracFrame& l, const FrameSplit& split, const SampleConfig& cfg) {
  const AlmostCouplingSplit dec = decompose_almost_coupling(l, split, cfg);
  Report r = dec.report;
  const std::vector<std::pair<std::string, std::string>> ids{
      {"ac-1", "sum_cycl X1(a2(X3)) + a1([X2,X3]) = 0 on L_H"},
      {"ac-2", "(L_Y a2)(X1) + a1([Y,X2]) = l([X1,X2])"},
      {"ac-3", "(L_X l1)(Y2) + l2([X,Y1]) = 0"},
      {"ac-4", "([Y1,Y2], i(Y1)d''l2 - i(Y2)d''l1 + d''(l2(Y1))) lies in L_F"}};
  if (!r.passed()) return invalid_conditions(r, ids, "the structure is not almost coupling via H");
  const Chart& c = l.chart;
  const auto& h = dec.h_part;
  const auto& f = dec.f_part;
  auto tag = [](const char* p, std::size_t i) { return std::string(p) + std::to_string(i + 1); };
  auto d2 = [&](const Form& w) { return cartan::bigraded_d(w, split).d_double_prime; };
  auto d2f = [&](const Expr& fn) {
    Form out(c, 1);
    for (int a : c.leaf()) out = out + split.lambda(a) * expr::differentiate(fn, c.name(a));
    return out;
  };

  Check k1 = make_check(ids[0].first, ids[0].second);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = i + 1; j < h.size(); ++j)
      for (std::size_t k = j + 1; k < h.size(); ++k) {
        Expr v;
        const std::size_t cyc[3][3] = {{i, j, k}, {j, k, i}, {k, i, j}};
        for (const auto& t : cyc) {
          const Section& s1 = h[t[0]];
          const Section& s2 = h[t[1]];
          const Section& s3 = h[t[2]];
          v += cartan::apply(s1.vector, cartan::contract(s2.form, s3.vector)) +
               cartan::contract(s1.form, cartan::lie_bracket(s2.vector, s3.vector));
        }
        absorb(k1, expr::classify_zero(v, cfg), {{"H elements", tag("h", i) + "," + tag("h", j) + "," + tag("h", k)}},
               "value");
      }
  r.add(k1);

  Check k2 = make_check(ids[1].first, ids[1].second);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t j = 0; j < h.size(); ++j)
      for (std::size_t b = 0; b < f.size(); ++b) {
        const Section& s1 = h[i];
        const Section& s2 = h[j];
        const Section& y = f[b];
        const Expr v = cartan::contract(cartan::lie_derivative(y.vector, s2.form), s1.vector) +
                       cartan::contract(s1.form, cartan::lie_bracket(y.vector, s2.vector)) -
                       cartan::contract(y.form, cartan::lie_bracket(s1.vector, s2.vector));
        absorb(k2, expr::classify_zero(v, cfg), {{"elements", tag("h", i) + "," + tag("h", j) + ";" + tag("f", b)}},
               "value");
      }
  r.add(k2);

  Check k3 = make_check(ids[2].first, ids[2].second);
  for (std::size_t i = 0; i < h.size(); ++i)
    for (std::size_t a = 0; a < f.size(); ++a)
      for (std::size_t b = 0; b < f.size(); ++b) {
        const Section& x = h[i];
        const Section& y1 = f[a];
        const Section& y2 = f[b];
        const Expr v = cartan::contract(cartan::lie_derivative(x.vector, y1.form), y2.vector) +
                       cartan::contract(y2.form, cartan::lie_bracket(x.vector, y1.vector));
        absorb(k3, expr::classify_zero(v, cfg), {{"elements", tag("h", i) + ";" + tag("f", a) + "," + tag("f", b)}},
               "value");
      }
  r.add(k3);

  Check k4 = make_check(ids[3].first, ids[3].second);
  for (std::size_t a = 0; a < f.size(); ++a)
    for (std::size_t b = a + 1; b < f.size(); ++b) {
      const Section& y1 = f[a];
      const Section& y2 = f[b];
      const Section s(cartan::lie_bracket(y1.vector, y2.vector),
                      cartan::interior(y1.vector, d2(y2.form)) - cartan::interior(y2.vector, d2(y1.form)) +
                          d2f(cartan::contract(y2.form, y1.vector)));
      for (std::size_t m = 0; m < f.size(); ++m) {
        absorb(k4, expr::classify_zero(courant::g(s, f[m]), cfg),
               {{"elements", tag("f", a) + "," + tag("f", b) + ";" + tag("f", m)}}, "g");
      }
    }
  r.add(k4);
  return r;
}

Report check_integrability_poisson(const Multivector& p, const FrameSplit& split, const SampleConfig& cfg) {
  const Chart& c = split.chart();
  if (!(p.chart() == c)) throw ChartMismatchError();
  const Multivector p1 = multivector_part(p, split, 2, 0);
  const Multivector p2 = multivector_part(p, split, 0, 2);
  Report r;
  Check ac = make_check("almost-coupling", "P = P'(2,0) + P''(0,2)");
  absorb_tensor(ac, p - p1 - p2, cfg, {});
  r.add(ac);
  const std::vector<std::pair<std::string, std::string>> ids{
      {"poisson-1", "(L_{sharp' c} P')(a, b) = d'c(sharp' a, sharp' b)"},
      {"poisson-2", "(L_{sharp'' n} P')(a, b) = -n([sharp' a, sharp' b])"},
      {"poisson-3", "(L_{sharp' c} P'')(l, m) = 0"},
      {"poisson-4", "(L_{sharp'' n} P'')(l, m) = d''n(sharp'' l, sharp'' m)"}};
  if (!r.passed()) return invalid_conditions(r, ids, "the bivector is not almost coupling via H");

  std::vector<Form> hs;  // Omega^{1,0} basis
  std::vector<Form> fs;  // Omega^{0,1} basis
  for (int u : c.transverse()) hs.push_back(cartan::dx(c, u));
  for (int a : c.leaf()) fs.push_back(split.lambda(a));
  auto s1 = [&](const Form& a) { return cartan::sharp(p1, a); };
  auto s2 = [&](const Form& a) { return cartan::sharp(p2, a); };
  auto dd = [&](const Form& w) { return cartan::bigraded_d(w, split); };
  auto ctx = [](const std::string& k, std::size_t a, std::size_t b, std::size_t e) {
    return Entries{{"basis forms", k + std::to_string(a + 1) + "," + std::to_string(b + 1) + "," + std::to_string(e + 1)}};
  };

  Check k1 = make_check(ids[0].first, ids[0].second);
  Check k2 = make_check(ids[1].first, ids[1].second);
  for (std::size_t i = 0; i < hs.size(); ++i)
    for (std::size_t j = i + 1; j < hs.size(); ++j) {
      const Multivector xa = s1(hs[i]);
      const Multivector xb = s1(hs[j]);
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const Expr v = cartan::evaluate_multivector(cartan::lie_derivative(s1(hs[k]), p1), {hs[i], hs[j]}) -
                       cartan::evaluate_form(dd(hs[k]).d_prime, {xa, xb});
        absorb(k1, expr::classify_zero(v, cfg), ctx("a,b,c=", i, j, k), "value");
      }
      const Multivector br = cartan::lie_bracket(xa, xb);
      for (std::size_t k = 0; k < fs.size(); ++k) {
        const Expr v = cartan::evaluate_multivector(cartan::lie_derivative(s2(fs[k]), p1), {hs[i], hs[j]}) +
                       cartan::contract(fs[k], br);
        absorb(k2, expr::classify_zero(v, cfg), ctx("a,b;n=", i, j, k), "value");
      }
    }
  Check k3 = make_check(ids[2].first, ids[2].second);
  Check k4 = make_check(ids[3].first, ids[3].second);
  for (std::size_t i = 0; i < fs.size(); ++i)
    for (std::size_t j = i + 1; j < fs.size(); ++j) {
      for (std::size_t k = 0; k < hs.size(); ++k) {
        const Expr v = cartan::evaluate_multivector(cartan::lie_derivative(s1(hs[k]), p2), {fs[i], fs[j]});
        absorb(k3, expr::classify_zero(v, cfg), ctx("l,m;c=", i, j, k), "value");
      }
      for (std::size_t k = 0; k < fs.size(); ++k) {
        const Expr v = cartan::evaluate_multivector(cartan::lie_derivative(s2(fs[k]), p2), {fs[i], fs[j]}) -
                       cartan::evaluate_form(dd(fs[k]).d_double_prime, {s2(fs[i]), s2(fs[j])});
        absorb(k4, expr::classify_zero(v, cfg), ctx("l,m,n=", i, j, k), "value");
      }
    }
  r.add(k1);
  r.add(k2);
  r.add(k3);
  r.add(k4);
  return r;
}

Report check_integrability_presymplectic(const Form& tau, const FrameSplit& split, const SampleConfig& cfg) {
  const Chart& c = split.chart();
  if (!(tau.chart() == c)) throw ChartMismatchError();
  const Form t1 = split.part(tau, 2, 0);
  const Form t2 = split.part(tau, 0, 2);
  Report r;
  Check ac = make_check("almost-coupling", "tau = tau'(2,0) + tau''(0,2)");
  absorb_tensor(ac, tau - t1 - t2, cfg, {});
  r.add(ac);
  const std::vector<std::pair<std::string, std::string>> ids{{"presymplectic-1", "d''tau'' = 0"},
                                                             {"presymplectic-2", "d'tau' = 0"},
                                                             {"presymplectic-3", "d''tau' + partial tau'' = 0"},
                                                             {"presymplectic-4", "d'tau'' = 0"}};
  if (!r.passed()) return invalid_conditions(r, ids, "the 2-form is not almost coupling via H");
  if (c.n() < 3) {
    for (const auto& [id, anchor] : ids) {
      Check k = make_check(id, anchor);
      k.note = "vacuous: 3-forms vanish in dimension < 3";
      r.add(k);
    }
    return r;
  }
  const cartan::BigradedD d1 = cartan::bigraded_d(t1, split);
  const cartan::BigradedD d2 = cartan::bigraded_d(t2, split);
  const Form terms[4] = {d2.d_double_prime, d1.d_prime, d1.d_double_prime + d2.partial, d2.d_prime};
  for (std::size_t i = 0; i < 4; ++i) {
    Check k = make_check(ids[i].first, ids[i].second);
    absorb_tensor(k, terms[i], cfg, {});
    r.add(k);
  }
  const Form dtau = cartan::ext_d(tau);
  Table t{"d tau", {}};
  for (const auto& [tb, lb] : std::vector<std::pair<int, int>>{{0, 3}, {3, 0}, {2, 1}, {1, 2}}) {
    t.entries.emplace_back("(" + std::to_string(tb) + "," + std::to_string(lb) + ")", split.part(dtau, tb, lb).str());
  }
  r.add_table(t);
  return r;
}

}  // namespace dirac::coupling
