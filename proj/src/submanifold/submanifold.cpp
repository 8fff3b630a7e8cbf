#include "dirac/submanifold.hpp"

#include <algorithm>

#include "dirac/errors.hpp"

namespace dirac::submanifold {

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

Mask bit(int i) { return Mask{1} << i; }

std::string section_name(std::size_t i) { return "l" + std::to_string(i + 1); }

std::string vector_str(const QVector& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) out += (i > 0 ? " " : "") + expr::to_string(v[i]);
  return out + "]";
}

QVector unit(std::size_t n, std::size_t i) {
  QVector v(n);
  v[i] = 1;
  return v;
}

bool in_span(const QMatrix& independent_rows, const QVector& v, std::size_t cols) {
  QMatrix m = independent_rows;
  m.push_back(v);
  return linalg::rank(m, cols) == static_cast<int>(independent_rows.size());
}

// L_p cut by vanishing of the listed fiber coordinates.
QMatrix cut(const QMatrix& rows, int n, const std::vector<int>& fiber_coords) {
  QMatrix constraints;
  for (int k : fiber_coords) constraints.push_back(unit(static_cast<std::size_t>(2 * n), static_cast<std::size_t>(k)));
  return linalg::restrict_span(rows, constraints, static_cast<std::size_t>(2 * n));
}

std::map<std::string, Scalar> zero_normal(const Normalized& n) {
  std::map<std::string, Scalar> out;
  for (int a : n.normal()) out[n.chart().name(a)] = 0;
  return out;
}

courant::PointSet points_on(const DiracFrame& l, const Normalized& n, const SampleConfig& cfg) {
  return courant::sample_points(n.chart(), l.coefficients(), cfg, zero_normal(n));
}

ExactPoint tangent_point(const Normalized& n, const ExactPoint& p) {
  ExactPoint out;
  for (int t : n.tangent()) out[n.chart().name(t)] = p.at(n.chart().name(t));
  return out;
}

Form normal_components(const Normalized& n, const Form& w) {
  Form out(w.chart(), 1);
  for (int a : n.normal()) out.set(bit(a), w[a]);
  return out;
}

Form tangent_components(const Normalized& n, const Form& w) {
  Form out(w.chart(), 1);
  for (int t : n.tangent()) out.set(bit(t), w[t]);
  return out;
}

Expr extension_scale(const Normalized& n, Extension e) {
  if (e == Extension::Constant || n.normal().empty()) return Expr(1);
  return Expr(1) + n.chart().coord(n.normal().front()).pow(2);
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
      where += (first ? "" : ",") + t.chart().name(i);
      first = false;
    }
    where += "]";
  }
  absorb(c, tv.verdict, context, where);
}

// Extension of a section of A_N to a section of L with frame coefficients
// solved along N.
Section extend(const DiracFrame& l, const Normalized& n, const Section& s, Extension e, const SampleConfig& cfg) {
  const Chart& c = n.chart();
  if (!(s.chart() == c) || !(l.chart == c)) throw ChartMismatchError();
  const Section sn = n.restrict(s);
  for (int a : n.normal()) {
    if (expr::classify_zero(sn.vector[a], cfg).status == expr::ZeroVerdict::Status::NonZero) {
      throw PreconditionError("section is not in A_N: its vector part is not tangent to N");
    }
  }
  std::vector<Section> frame;
  for (const auto& li : l.sections) frame.push_back(n.restrict(li));
  for (std::size_t j = 0; j < frame.size(); ++j) {
    if (expr::classify_zero(courant::g(sn, frame[j]), cfg).status == expr::ZeroVerdict::Status::NonZero) {
      throw PreconditionError("section is not in A_N: it does not lie in L along N (pairing with " +
                              section_name(j) + ")");
    }
  }
  const int dim = c.n();
  linalg::EMatrix m(static_cast<std::size_t>(2 * dim), std::vector<Expr>(frame.size()));
  std::vector<Expr> rhs(static_cast<std::size_t>(2 * dim));
  for (int r = 0; r < dim; ++r) {
    for (std::size_t i = 0; i < frame.size(); ++i) {
      m[static_cast<std::size_t>(r)][i] = frame[i].vector[r];
      m[static_cast<std::size_t>(dim + r)][i] = frame[i].form[r];
    }
    rhs[static_cast<std::size_t>(r)] = sn.vector[r];
    rhs[static_cast<std::size_t>(dim + r)] = sn.form[r];
  }
  const auto coef = linalg::symbolic_solve(m, rhs, frame.size());
  if (!coef) throw PreconditionError("section is not in A_N: not a combination of the frame along N");
  const Expr scale = extension_scale(n, e);
  Section out = Section::zero(c);
  for (std::size_t i = 0; i < l.sections.size(); ++i) {
    if (!(*coef)[i].is_zero()) out = out + l.sections[i] * ((*coef)[i] * scale);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Normalized

Normalized::Normalized(Chart chart, const std::vector<std::string>& normal_coords) : chart_(std::move(chart)) {
  for (const auto& name : normal_coords) normal_.push_back(chart_.index_of(name));
  std::sort(normal_.begin(), normal_.end());
  normal_.erase(std::unique(normal_.begin(), normal_.end()), normal_.end());
  std::vector<std::string> names;
  for (int i = 0; i < chart_.n(); ++i) {
    if (!is_normal(i)) {
      tangent_.push_back(i);
      names.push_back(chart_.name(i));
    }
  }
  sub_ = Chart(names);
  for (int a : normal_) on_n_[chart_.name(a)] = Expr(0);
}

bool Normalized::is_normal(int i) const { return std::binary_search(normal_.begin(), normal_.end(), i); }

Section Normalized::tangent_part(const Section& s) const {
  Multivector x(chart_, 1);
  for (int t : tangent_) x.set(bit(t), s.vector[t]);
  return {x, tangent_components(*this, s.form)};
}

Section Normalized::normal_part(const Section& s) const {
  Multivector x(chart_, 1);
  for (int a : normal_) x.set(bit(a), s.vector[a]);
  return {x, normal_components(*this, s.form)};
}

Section Normalized::to_submanifold(const Section& s) const {
  const Section r = restrict(s);
  std::vector<Expr> xs;
  std::vector<Expr> as;
  for (int t : tangent_) {
    xs.push_back(r.vector[t]);
    as.push_back(r.form[t]);
  }
  return {Multivector::from_components(sub_, xs), Form::from_components(sub_, as)};
}

Form Normalized::to_submanifold(const Form& w) const {
  std::vector<Expr> as;
  for (int t : tangent_) as.push_back(restrict(w[t]));
  return Form::from_components(sub_, as);
}

Form Normalized::from_submanifold(const Form& w) const {
  if (!(w.chart() == sub_)) throw ChartMismatchError();
  Form out(chart_, 1);
  for (std::size_t k = 0; k < tangent_.size(); ++k) out.set(bit(tangent_[k]), w[static_cast<int>(k)]);
  return out;
}

// ---------------------------------------------------------------- Metric

Metric::Metric(Chart chart, linalg::EMatrix g) : chart_(std::move(chart)), g_(std::move(g)) {
  const auto n = static_cast<std::size_t>(chart_.n());
  if (g_.size() != n) throw PreconditionError("metric has the wrong size");
  for (std::size_t i = 0; i < n; ++i) {
    if (g_[i].size() != n) throw PreconditionError("metric has the wrong size");
    for (std::size_t j = 0; j < i; ++j) {
      if (!g_[i][j].equals(g_[j][i])) throw PreconditionError("metric is not symmetric");
    }
  }
  const auto inv = linalg::symbolic_inverse(g_);
  if (!inv) throw PreconditionError("metric is degenerate");
  co_ = *inv;
}

Metric Metric::euclidean(const Chart& chart) {
  const auto n = static_cast<std::size_t>(chart.n());
  linalg::EMatrix g(n, std::vector<Expr>(n));
  for (std::size_t i = 0; i < n; ++i) g[i][i] = Expr(1);
  return {chart, g};
}

Expr Metric::pair(const Form& a, const Form& b) const {
  Expr s;
  for (const auto& [mi, ai] : a.components()) {
    const int i = cartan::mask_indices(mi).front();
    for (const auto& [mj, bj] : b.components()) {
      const int j = cartan::mask_indices(mj).front();
      const Expr& c = co_[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!c.is_zero()) s += ai * c * bj;
    }
  }
  return s;
}

// ---------------------------------------------------------------- pointwise

PointSubspace restrict_at_point(const DiracFrame& l, const Normalized& n, const ExactPoint& p, Direction d) {
  const Chart& c = n.chart();
  if (!(l.chart == c)) throw ChartMismatchError();
  for (int a : n.normal()) {
    const auto it = p.find(c.name(a));
    if (it == p.end() || it->second != 0) throw PreconditionError("the point is not on N");
  }
  const PointSubspace lp = courant::fiber_at(l, p);
  const int dim = c.n();
  std::vector<int> killed;
  for (int a : n.normal()) killed.push_back(d == Direction::Pullback ? a : dim + a);
  const QMatrix meet = cut(lp.rows, dim, killed);
  QMatrix projected;
  for (const auto& row : meet) {
    QVector v;
    for (int t : n.tangent()) v.push_back(row[static_cast<std::size_t>(t)]);
    for (int t : n.tangent()) v.push_back(row[static_cast<std::size_t>(dim + t)]);
    projected.push_back(std::move(v));
  }
  PointSubspace out;
  out.point = tangent_point(n, p);
  out.n = static_cast<int>(n.tangent().size());
  out.rows = linalg::row_basis(projected, static_cast<std::size_t>(2 * out.n));
  out.exact = lp.exact;
  return out;
}

Report kernel_and_properness(const DiracFrame& l, const Normalized& n, const SampleConfig& cfg) {
  const Chart& c = n.chart();
  if (!(l.chart == c)) throw ChartMismatchError();
  const int dim = c.n();
  const auto cols = static_cast<std::size_t>(2 * dim);
  Report r;
  Check proper = make_check("properly-normalized", "L|_N = (L cap (nu N + nu*N)) + (L cap (TN + T*N))");
  Check pk = make_check("poisson-kernel", "TN cap sharp_P(ann TN) = 0");
  Table kt{"K(N)", {}};

  std::vector<int> kernel_cut(n.normal().begin(), n.normal().end());
  for (int t : n.tangent()) kernel_cut.push_back(dim + t);

  const auto pts = points_on(l, n, cfg);
  for (std::size_t k = 0; k < pts.points.size(); ++k) {
    const ExactPoint& p = pts.points[k];
    const PointSubspace lp = courant::fiber_at(l, p);
    if (!lp.exact) proper.exact = false;
    QMatrix kn;
    for (const auto& row : cut(lp.rows, dim, kernel_cut)) kn.emplace_back(row.begin(), row.begin() + dim);
    kt.entries.emplace_back("point " + std::to_string(k + 1),
                            "dim K = " + std::to_string(linalg::rank(kn, static_cast<std::size_t>(dim))));

    for (std::size_t i = 0; i < l.sections.size(); ++i) {
      const Section& s = l.sections[i];
      for (const auto& [part, name] : {std::pair{n.tangent_part(s), "TN + T*N"}, std::pair{n.normal_part(s), "nu N + nu*N"}}) {
        if (!in_span(lp.rows, courant::fiber_vector(part, p), cols)) {
          proper.status = Status::Fail;
          if (proper.witnesses.size() < 4) {
            proper.witnesses.push_back({point_entries(p), {{"section", section_name(i)}, {"part outside L", name}}});
          }
        }
      }
    }

    if (l.bivector) {
      QMatrix sharps;
      for (int a : n.normal()) {
        const Section s(cartan::sharp(*l.bivector, cartan::dx(c, a)), Form(c, 1));
        const QVector v = courant::fiber_vector(s, p);
        sharps.emplace_back(v.begin(), v.begin() + dim);
      }
      QMatrix constraints;
      for (int a : n.normal()) constraints.push_back(unit(static_cast<std::size_t>(dim), static_cast<std::size_t>(a)));
      const QMatrix meet = linalg::restrict_span(sharps, constraints, static_cast<std::size_t>(dim));
      if (!meet.empty()) {
        pk.status = Status::Fail;
        if (pk.witnesses.size() < 4) pk.witnesses.push_back({point_entries(p), {{"vector", vector_str(meet.front())}}});
      }
    }
  }
  if (pts.exhausted) {
    for (Check* ch : {&proper, &pk}) {
      if (ch->status == Status::Pass) {
        ch->status = Status::Unknown;
        ch->note = "too many singular sample points";
      }
    }
  }
  r.add(proper);
  if (l.bivector) r.add(pk);
  r.add_table(kt);
  return r;
}

InducedStructure induced_structure(const DiracFrame& l, const Normalized& n, const SampleConfig& cfg) {
  const Report kp = kernel_and_properness(l, n, cfg);
  if (kp.status_of("properly-normalized") != Status::Pass) {
    throw PreconditionError("N is not properly normalized");
  }
  const Chart& sub = n.submanifold_chart();
  const int m = sub.n();
  const int dim = n.chart().n();

  std::vector<Section> candidates;
  for (const auto& s : l.sections) {
    const Section t = n.to_submanifold(s);
    if (!t.vector.is_zero() || !t.form.is_zero()) candidates.push_back(t);
  }
  SampleConfig one = cfg;
  one.count = 1;
  const auto first = points_on(l, n, one);
  std::vector<Section> chosen;
  if (!first.points.empty()) {
    const ExactPoint pt = tangent_point(n, first.points.front());
    QMatrix rows;
    for (const auto& s : candidates) {
      QMatrix trial = rows;
      trial.push_back(courant::fiber_vector(s, pt));
      if (linalg::rank(trial, static_cast<std::size_t>(2 * m)) > static_cast<int>(rows.size())) {
        rows = std::move(trial);
        chosen.push_back(s);
      }
    }
  }
  InducedStructure out;
  out.frame = courant::frame_of(sub, chosen);

  Check pp = make_check("pullback-pushforward", "the pullback and the pushforward of L coincide with the frame");
  Check ex = make_check("exact-sequence", "dim A_N = dim (L cap ann TN) + dim L(N)");
  const auto pts = points_on(l, n, cfg);
  std::vector<int> a_cut(n.normal().begin(), n.normal().end());
  std::vector<int> ann_cut;
  for (int i = 0; i < dim; ++i) ann_cut.push_back(i);
  for (int t : n.tangent()) ann_cut.push_back(dim + t);
  for (const auto& p : pts.points) {
    const PointSubspace pb = restrict_at_point(l, n, p, Direction::Pullback);
    const PointSubspace pf = restrict_at_point(l, n, p, Direction::Pushforward);
    const auto cols = static_cast<std::size_t>(2 * m);
    bool ok = static_cast<int>(pb.rows.size()) == m && linalg::row_space_equal(pb.rows, pf.rows, cols);
    std::string frame_rank = "singular";
    try {
      const PointSubspace fr = courant::fiber_at(out.frame, pb.point);
      frame_rank = std::to_string(fr.rows.size());
      ok = ok && linalg::row_space_equal(pb.rows, fr.rows, cols);
    } catch (const PreconditionError&) {
      ok = false;
    }
    if (!ok) {
      pp.status = Status::Fail;
      if (pp.witnesses.size() < 4) {
        pp.witnesses.push_back({point_entries(p), {{"dim pullback", std::to_string(pb.rows.size())},
                                                   {"dim pushforward", std::to_string(pf.rows.size())},
                                                   {"frame rank", frame_rank}}});
      }
    }
    const PointSubspace lp = courant::fiber_at(l, p);
    const std::size_t a_n = cut(lp.rows, dim, a_cut).size();
    const std::size_t ann = cut(lp.rows, dim, ann_cut).size();
    if (a_n != ann + pb.rows.size()) {
      ex.status = Status::Fail;
      if (ex.witnesses.size() < 4) {
        ex.witnesses.push_back({point_entries(p), {{"dim A_N", std::to_string(a_n)},
                                                   {"dim L cap ann TN", std::to_string(ann)},
                                                   {"dim L(N)", std::to_string(pb.rows.size())}}});
      }
    }
  }
  if (pts.exhausted && pp.status == Status::Pass) {
    pp.status = Status::Unknown;
    pp.note = "too many singular sample points";
  }
  out.report.add(pp);
  out.report.add(ex);
  out.report.append(courant::check_dirac(out.frame, cfg));
  return out;
}

// ---------------------------------------------------------------- brackets

Section bracket_A(const DiracFrame& l, const Normalized& n, const Section& s1, const Section& s2, Extension e,
                  const SampleConfig& cfg) {
  const Section e1 = extend(l, n, s1, e, cfg);
  const Section e2 = extend(l, n, s2, e, cfg);
  return n.restrict(courant::courant_bracket(e1, e2));
}

Section iota_sharp(const Normalized& n, const Section& s) { return n.to_submanifold(s); }

SecondFundamentalForm second_fundamental_form(const DiracFrame& l, const Normalized& n, const Section& s1,
                                              const Section& s2, const SampleConfig& cfg) {
  const Chart& c = n.chart();
  const Section t1(s1.vector, tangent_components(n, s1.form));
  const Section t2(s2.vector, tangent_components(n, s2.form));
  const Section e1 = extend(l, n, t1, Extension::Constant, cfg);
  const Section e2 = extend(l, n, t2, Extension::Constant, cfg);
  const Section br = n.restrict(courant::courant_bracket(e1, e2));
  const Section br2 = bracket_A(l, n, t1, t2, Extension::Scaled, cfg);

  SecondFundamentalForm out;
  out.gauss = normal_components(n, br.form);
  out.direct = Form(c, 1);
  for (int a : n.normal()) {
    const Multivector z = cartan::partial(c, a);
    const Expr v = cartan::apply(z, cartan::evaluate_form(e1.form, {e2.vector})) -
                   cartan::evaluate_form(e1.form, {cartan::lie_bracket(z, e2.vector)}) +
                   cartan::evaluate_form(e2.form, {cartan::lie_bracket(z, e1.vector)});
    out.direct.set(bit(a), n.restrict(v));
  }

  Check indep = make_check("extension-independence", "bracket_A does not depend on the extension");
  absorb_tensor(indep, br.vector - br2.vector, cfg, {}, "vector");
  absorb_tensor(indep, br.form - br2.form, cfg, {}, "form");
  out.report.add(indep);
  Check gd = make_check("gauss-direct", "the nu*N part of bracket_A equals the direct formula");
  absorb_tensor(gd, out.gauss - out.direct, cfg, {}, "B");
  out.report.add(gd);

  if (l.bivector) {
    const Form lam = n.restrict(t1).form;
    const Form mu = n.restrict(t2).form;
    Form pf(c, 1);
    for (int a : n.normal()) {
      const Multivector lz = cartan::lie_derivative(cartan::partial(c, a), *l.bivector);
      pf.set(bit(a), n.restrict(-cartan::evaluate_multivector(lz, {lam, mu})));
    }
    out.poisson = pf;
    Check pc = make_check("poisson-formula", "-(L_Z P)(a1, a2) equals -B under sharp_P a = i(a) P");
    absorb_tensor(pc, pf + out.gauss, cfg, {}, "B");
    pc.note = "the Poisson-case formula carries the opposite sign of the bracket decomposition";
    out.report.add(pc);
  }
  return out;
}

Report cosymplectic_verdicts(const DiracFrame& l, const Normalized& n, const SampleConfig& cfg) {
  const Chart& c = n.chart();
  const int dim = c.n();
  const int codim = static_cast<int>(n.normal().size());
  Report r;
  Check cos = make_check("cosymplectic", "H(L, N) + TN = TM at every sample point of N");
  std::vector<int> ann_cut;
  for (int t : n.tangent()) ann_cut.push_back(dim + t);
  const auto pts = points_on(l, n, cfg);
  for (const auto& p : pts.points) {
    const PointSubspace lp = courant::fiber_at(l, p);
    QMatrix h;
    for (const auto& row : cut(lp.rows, dim, ann_cut)) h.emplace_back(row.begin(), row.begin() + dim);
    h = linalg::row_basis(h, static_cast<std::size_t>(dim));
    QMatrix ht = h;
    for (int t : n.tangent()) ht.push_back(unit(static_cast<std::size_t>(dim), static_cast<std::size_t>(t)));
    if (static_cast<int>(h.size()) != codim || linalg::rank(ht, static_cast<std::size_t>(dim)) != dim) {
      cos.status = Status::Fail;
      if (cos.witnesses.size() < 4) cos.witnesses.push_back({point_entries(p), {{"dim H", std::to_string(h.size())}}});
    }
  }
  if (pts.exhausted && cos.status == Status::Pass) {
    cos.status = Status::Unknown;
    cos.note = "too many singular sample points";
  }
  r.add(cos);

  const Report kp = kernel_and_properness(l, n, cfg);
  r.add(*kp.find("properly-normalized"));
  Check td = make_check("totally-dirac", "properly normalized with vanishing second fundamental form");
  const Status proper = kp.status_of("properly-normalized");
  if (proper != Status::Pass) {
    td.status = proper;
    td.note = "N is not properly normalized";
  } else {
    std::vector<std::pair<std::size_t, Section>> parts;
    for (std::size_t i = 0; i < l.sections.size(); ++i) {
      const Section t = n.restrict(n.tangent_part(l.sections[i]));
      if (!t.vector.is_zero() || !t.form.is_zero()) parts.emplace_back(i, t);
    }
    for (std::size_t i = 0; i < parts.size(); ++i) {
      for (std::size_t j = i + 1; j < parts.size(); ++j) {
        const Entries ctx{{"pair", section_name(parts[i].first) + "," + section_name(parts[j].first)}};
        try {
          const SecondFundamentalForm b = second_fundamental_form(l, n, parts[i].second, parts[j].second, cfg);
          absorb_tensor(td, b.gauss, cfg, ctx, "B");
        } catch (const PreconditionError& e) {
          td.status = worst(td.status, Status::Unknown);
          td.note = e.what();
        }
      }
    }
  }
  r.add(td);
  return r;
}

// ---------------------------------------------------------------- contravariant derivative

Form koszul_bracket(const Multivector& p, const Form& a, const Form& b) {
  const Chart& c = p.chart();
  return cartan::lie_derivative(cartan::sharp(p, a), b) - cartan::lie_derivative(cartan::sharp(p, b), a) -
         cartan::differential(c, cartan::evaluate_multivector(p, {a, b}));
}

Form contravariant_derivative(const Multivector& p, const Metric& g, const Form& a, const Form& b) {
  const Chart& c = p.chart();
  if (!(g.chart() == c) || !(a.chart() == c) || !(b.chart() == c)) throw ChartMismatchError();
  const Multivector sa = cartan::sharp(p, a);
  const Multivector sb = cartan::sharp(p, b);
  const Form ab = koszul_bracket(p, a, b);
  const auto n = static_cast<std::size_t>(c.n());
  std::vector<Expr> rhs(n);
  for (std::size_t k = 0; k < n; ++k) {
    const Form gk = cartan::dx(c, static_cast<int>(k));
    rhs[k] = cartan::apply(sa, g.pair(b, gk)) + cartan::apply(sb, g.pair(gk, a)) -
             cartan::apply(cartan::sharp(p, gk), g.pair(a, b)) + g.pair(ab, gk) +
             g.pair(koszul_bracket(p, gk, a), b) + g.pair(koszul_bracket(p, gk, b), a);
  }
  std::vector<Expr> comps(n);
  for (std::size_t j = 0; j < n; ++j) {
    Expr s;
    for (std::size_t k = 0; k < n; ++k) {
      if (!g.g()[j][k].is_zero() && !rhs[k].is_zero()) s += g.g()[j][k] * rhs[k];
    }
    comps[j] = s / Expr(2);
  }
  return Form::from_components(c, comps);
}

Report check_contravariant_derivative(const Multivector& p, const Metric& g, const SampleConfig& cfg) {
  const Chart& c = p.chart();
  const int n = c.n();
  std::vector<std::vector<Form>> d(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      d[static_cast<std::size_t>(i)].push_back(contravariant_derivative(p, g, cartan::dx(c, i), cartan::dx(c, j)));
    }
  }
  auto D = [&](int i, int j) -> const Form& { return d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]; };
  Check mc = make_check("metric-compatibility", "(sharp c) g(a, b) = g(D_c a, b) + g(a, D_c b)");
  Check tf = make_check("torsion-free", "D_a b - D_b a = {a, b}_P");
  for (int k = 0; k < n; ++k) {
    const Multivector sk = cartan::sharp(p, cartan::dx(c, k));
    for (int i = 0; i < n; ++i) {
      for (int j = i; j < n; ++j) {
        const Form a = cartan::dx(c, i);
        const Form b = cartan::dx(c, j);
        const Expr res = cartan::apply(sk, g.pair(a, b)) - g.pair(D(k, i), b) - g.pair(a, D(k, j));
        absorb(mc, expr::classify_zero(res, cfg), {{"c,a,b", c.name(k) + "," + c.name(i) + "," + c.name(j)}},
               "residual");
      }
    }
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Form res = D(i, j) - D(j, i) - koszul_bracket(p, cartan::dx(c, i), cartan::dx(c, j));
      absorb_tensor(tf, res, cfg, {{"a,b", c.name(i) + "," + c.name(j)}}, "residual");
    }
  }
  Report r;
  r.add(mc);
  r.add(tf);
  return r;
}

GaussSplit gauss_split(const Multivector& p, const Metric& g, const Normalized& n, const Form& a, const Form& b,
                       const SampleConfig& cfg) {
  const Chart& c = n.chart();
  if (!(p.chart() == c) || !(g.chart() == c) || !(a.chart() == c) || !(b.chart() == c)) throw ChartMismatchError();
  for (int t : n.tangent()) {
    for (int y : n.normal()) {
      const Expr gty = n.restrict(g.g()[static_cast<std::size_t>(t)][static_cast<std::size_t>(y)]);
      if (expr::classify_zero(gty, cfg).status == expr::ZeroVerdict::Status::NonZero) {
        throw PreconditionError("nu N is not g-orthogonal to TN along N");
      }
    }
  }
  const Report kp = kernel_and_properness(courant::graph_of_poisson(p), n, cfg);
  if (kp.status_of("properly-normalized") == Status::Fail || kp.status_of("poisson-kernel") == Status::Fail) {
    throw PreconditionError("N is not a properly normalized Poisson-Dirac submanifold");
  }

  const Form a0 = tangent_components(n, a.map([&](const Expr& e) { return n.restrict(e); }));
  const Form b0 = tangent_components(n, b.map([&](const Expr& e) { return n.restrict(e); }));
  const Expr scale = extension_scale(n, Extension::Scaled);
  auto restrict_form = [&](const Form& w) { return w.map([&](const Expr& e) { return n.restrict(e); }); };

  GaussSplit out;
  out.d_pn = restrict_form(contravariant_derivative(p, g, a0, b0));
  const Form d_scaled = restrict_form(contravariant_derivative(p, g, a0 * scale, b0 * scale));
  const Form d_swap = restrict_form(contravariant_derivative(p, g, b0, a0));

  // The induced bivector and metric on N.
  const Chart& sub = n.submanifold_chart();
  const auto m = n.tangent().size();
  Multivector pi(sub, 2);
  linalg::EMatrix gn(m, std::vector<Expr>(m));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      const int ti = n.tangent()[i];
      const int tj = n.tangent()[j];
      gn[i][j] = n.restrict(g.g()[static_cast<std::size_t>(ti)][static_cast<std::size_t>(tj)]);
      if (j > i) pi.set(bit(static_cast<int>(i)) | bit(static_cast<int>(j)), n.restrict(p.get(bit(ti) | bit(tj))));
    }
  }
  const Metric gsub(sub, gn);
  const Form an = n.to_submanifold(a0);
  const Form bn = n.to_submanifold(b0);
  out.d_pi = contravariant_derivative(pi, gsub, an, bn);
  out.psi = out.d_pn - n.from_submanifold(out.d_pi);
  const Form psi_swap = d_swap - n.from_submanifold(contravariant_derivative(pi, gsub, bn, an));
  out.b = normal_components(n, restrict_form(koszul_bracket(p, a0, b0)));

  Check indep = make_check("extension-independence", "D^P of extensions restricted to N does not depend on the extension");
  absorb_tensor(indep, out.d_pn - d_scaled, cfg, {}, "D");
  out.report.add(indep);

  // B from the Poisson-case formula, on arbitrary 1-forms along N.
  auto b_formula = [&](const Form& u, const Form& v) {
    Form w(c, 1);
    for (int y : n.normal()) {
      const Multivector lz = cartan::lie_derivative(cartan::partial(c, y), p);
      w.set(bit(y), n.restrict(-cartan::evaluate_multivector(lz, {u, v})));
    }
    return w;
  };
  Check gi = make_check("gauss-identity",
                        "-2 g(Psi(a, b), c) = g(B(a, b), c) + g(B(c, a), b) + g(B(c, b), a), B = -(L_Z P)");
  const Form bab = b_formula(a0, b0);
  for (int k = 0; k < c.n(); ++k) {
    const Form gk = cartan::dx(c, k);
    const Expr res = Expr(-2) * g.pair(out.psi, gk) -
                     (g.pair(bab, gk) + g.pair(b_formula(gk, a0), b0) + g.pair(b_formula(gk, b0), a0));
    absorb(gi, expr::classify_zero(n.restrict(res), cfg), {{"c", "d" + c.name(k)}}, "residual");
  }
  out.report.add(gi);
  Check sk = make_check("skew-part", "Psi(a, b) - Psi(b, a) = B(a, b)");
  absorb_tensor(sk, out.psi - psi_swap - out.b, cfg, {}, "residual");
  out.report.add(sk);
  return out;
}

}  // namespace dirac::submanifold
