#include "dirac/leafline.hpp"

#include "dirac/errors.hpp"
#include "dirac/linalg.hpp"

namespace dirac::leafline {

using cartan::Mask;
using courant::Section;
using linalg::QMatrix;

namespace {

Check make_check(const std::string& id, const std::string& anchor) {
  Check c;
  c.id = id;
  c.anchor = anchor;
  return c;
}

Mask bit(int i) { return Mask{1} << i; }

std::map<std::string, Expr> on_leaf(const Chart& c) {
  std::map<std::string, Expr> out;
  for (int a : c.leaf()) out[c.name(a)] = Expr(0);
  return out;
}

Expr at_leaf(const Expr& e, const Chart& c) { return expr::substitute(e, on_leaf(c)); }

std::map<std::string, Scalar> fixed_on_leaf(const Chart& c) {
  std::map<std::string, Scalar> out;
  for (int a : c.leaf()) out[c.name(a)] = 0;
  return out;
}

std::string label(const std::string& what, const Chart& c, int i, int j) {
  return what + "(" + c.name(i) + "," + c.name(j) + ")";
}

// Every coefficient function of a presentation, labelled.
std::vector<std::pair<std::string, Expr>> coefficients(const LeafPresentation& pres) {
  const Chart& c = pres.chart();
  std::vector<std::pair<std::string, Expr>> out;
  for (int u : c.transverse()) {
    for (int a : c.leaf()) out.emplace_back(label("A", c, a, u), pres.split.a(a, u));
  }
  for (int a : c.leaf()) {
    for (int b : c.leaf()) {
      if (b > a) out.emplace_back(label("B", c, a, b), pres.b.get(bit(a) | bit(b)));
    }
  }
  for (int u : c.transverse()) {
    for (int v : c.transverse()) {
      if (v > u) out.emplace_back(label("alpha", c, u, v), pres.alpha.get(bit(u) | bit(v)));
    }
  }
  return out;
}

// The rank of L + (F + ann F) at p, from the fiber coordinates X^u and theta_a.
int coupling_rank(const DiracFrame& l, const expr::ExactPoint& p) {
  const Chart& c = l.chart;
  const int n = c.n();
  QMatrix m;
  for (const auto& s : l.sections) {
    const auto v = courant::fiber_vector(s, p);
    linalg::QVector row;
    for (int j = 0; j < n; ++j) row.push_back(c.is_leaf(j) ? v[static_cast<std::size_t>(n + j)] : v[static_cast<std::size_t>(j)]);
    m.push_back(std::move(row));
  }
  return linalg::rank(m, static_cast<std::size_t>(n));
}

void check_coupling_at(Check& ch, const DiracFrame& l, const courant::PointSet& pts) {
  for (const auto& p : pts.points) {
    const int rk = coupling_rank(l, p);
    if (rk != l.chart.n()) {
      ch.status = worst(ch.status, Status::Fail);
      if (ch.witnesses.size() < 4) ch.witnesses.push_back({point_entries(p), {{"coupling rank", std::to_string(rk)}}});
    }
  }
  if (pts.exhausted && ch.status == Status::Pass) {
    ch.status = Status::Unknown;
    ch.note = "too many singular sample points";
  }
}

// Coefficients of a section of L|_S in the basis H_u, V^a, and the residual
// left after subtracting that combination.
std::vector<Expr> decompose(const Section& z, const std::vector<Section>& basis_on_s, Section& residual) {
  const Chart& c = z.chart();
  std::vector<Expr> coef(static_cast<std::size_t>(c.n()));
  residual = z;
  for (int i = 0; i < c.n(); ++i) {
    coef[static_cast<std::size_t>(i)] = c.is_leaf(i) ? z.form[i] : z.vector[i];
    if (!coef[static_cast<std::size_t>(i)].is_zero()) {
      residual = residual - basis_on_s[static_cast<std::size_t>(i)] * coef[static_cast<std::size_t>(i)];
    }
  }
  return coef;
}

std::string coefficient_list(const std::vector<Expr>& v) {
  std::string out = "[";
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += " ";
    out += v[i].str();
  }
  return out + "]";
}

std::string basis_name(const Chart& c, int i) { return (c.is_leaf(i) ? "V(" : "H(") + c.name(i) + ")"; }

}  // namespace

// ---------------------------------------------------------------- presentation

LeafPresentation dw_coefficients(const GeometricData& data, const SampleConfig& cfg) {
  const Chart& c = data.split.chart();
  LeafPresentation pres{data.split, data.pi, data.sigma, {}};

  Check vanish = make_check("leaf-vanishing", "A and B vanish on S = {y = 0}");
  for (const auto& [name, f] : coefficients(pres)) {
    if (name.rfind("alpha", 0) == 0) continue;
    absorb(vanish, expr::classify_zero(at_leaf(f, c), cfg), {{"coefficient", name}}, name + " on S");
  }
  if (vanish.status == Status::Fail) {
    std::string what = "S = {y = 0} is not a leaf";
    if (!vanish.witnesses.empty() && !vanish.witnesses.front().values.empty()) {
      const auto& v = vanish.witnesses.front().values.front();
      what += ": " + v.first + " = " + v.second;
    }
    throw PreconditionError(what);
  }
  pres.report.add(vanish);

  Check coupled = make_check("coupling-along-leaf", "L + (F + ann F) = TM + T*M on S and near S");
  const DiracFrame l = coupling::reconstruct(data);
  check_coupling_at(coupled, l, courant::sample_points(c, l.coefficients(), cfg, fixed_on_leaf(c)));
  SampleConfig near = cfg;
  near.box = cfg.box / 8;
  check_coupling_at(coupled, l, courant::sample_points(c, l.coefficients(), near, {}, false, 2));
  pres.report.add(coupled);
  return pres;
}

LeafPresentation dw_coefficients(const DiracFrame& l, const SampleConfig& cfg) {
  const Chart& c = l.chart;
  Check along = make_check("coupling-along-leaf", "L + (F + ann F) = TM + T*M on S and near S");
  check_coupling_at(along, l, courant::sample_points(c, l.coefficients(), cfg, fixed_on_leaf(c)));
  if (along.status == Status::Fail) throw PreconditionError("the structure is not coupling along S = {y = 0}");
  SampleConfig near = cfg;
  near.box = cfg.box / 8;
  LeafPresentation pres = dw_coefficients(coupling::extract_geometric_data(l, near), cfg);
  Report r;
  for (const auto& ch : pres.report.checks()) {
    if (ch.id != "coupling-along-leaf") r.add(ch);
  }
  Check merged = *pres.report.find("coupling-along-leaf");
  merged.status = worst(merged.status, along.status);
  for (const auto& w : along.witnesses) {
    if (merged.witnesses.size() < 4) merged.witnesses.push_back(w);
  }
  r.add(merged);
  pres.report = r;
  return pres;
}

// ---------------------------------------------------------------- algebroid

LeafAlgebroid leaf_algebroid(const LeafPresentation& pres, const SampleConfig& cfg) {
  const Chart& c = pres.chart();
  const int n = c.n();
  const std::vector<Section> basis = coupling::reconstruct(pres.data()).sections;
  std::vector<Section> basis_on_s;
  for (const auto& s : basis) basis_on_s.push_back(courant::substitute(s, on_leaf(c)));
  const Expr scale = c.p() > 0 ? Expr(1) + c.coord(c.leaf().front()).pow(2) : Expr(1);

  LeafAlgebroid out;
  Check indep = make_check("extension-independence", "[e_i, e_j]_S does not depend on the extension off S");
  Check formulas = make_check("bracket-formulas", "[V,V]_S = dB/dy V, [H,V]_S = dA/dy V, [H,H]_S = dalpha/dy V");
  Check in_l = make_check("bracket-in-L", "[e_i, e_j]_S lies in L|_S");
  if (c.p() == 0) indep.note = "no normal coordinates; both extensions coincide";

  auto derivative_at_leaf = [&](const Expr& f, int k) { return at_leaf(expr::differentiate(f, c.name(k)), c); };

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Entries ctx{{"pair", basis_name(c, i) + "," + basis_name(c, j)}};
      const auto ui = static_cast<std::size_t>(i);
      const auto uj = static_cast<std::size_t>(j);
      Section residual;
      const Section plain = courant::substitute(courant::courant_bracket(basis[ui], basis[uj]), on_leaf(c));
      const std::vector<Expr> p = decompose(plain, basis_on_s, residual);
      for (const auto& [m, v] : residual.vector.components()) absorb(in_l, expr::classify_zero(v, cfg), ctx, "residual.vector");
      for (const auto& [m, v] : residual.form.components()) absorb(in_l, expr::classify_zero(v, cfg), ctx, "residual.form");

      const Section scaled =
          courant::substitute(courant::courant_bracket(basis[ui] * scale, basis[uj] * scale), on_leaf(c));
      const std::vector<Expr> q = decompose(scaled, basis_on_s, residual);

      std::vector<Expr> f(static_cast<std::size_t>(n));
      for (int k : c.leaf()) {
        Expr coef;
        if (c.is_leaf(i) && c.is_leaf(j)) {
          coef = derivative_at_leaf(pres.b.get(bit(i) | bit(j)), k);
        } else if (c.is_leaf(i) != c.is_leaf(j)) {
          const int u = c.is_leaf(i) ? j : i;
          const int a = c.is_leaf(i) ? i : j;
          coef = derivative_at_leaf(pres.split.a(a, u), k);
          if (c.is_leaf(i)) coef = -coef;
        } else {
          coef = derivative_at_leaf(pres.alpha.get(bit(i) | bit(j)), k);
        }
        f[static_cast<std::size_t>(k)] = coef;
      }

      for (int k = 0; k < n; ++k) {
        const auto uk = static_cast<std::size_t>(k);
        const std::string name = "coefficient of " + basis_name(c, k);
        absorb(indep, expr::classify_zero(p[uk] - q[uk], cfg), ctx, name);
        absorb(formulas, expr::classify_zero(p[uk] - f[uk], cfg), ctx, name);
      }
      out.constant_extension.brackets[{i, j}] = p;
      out.scaled_extension.brackets[{i, j}] = q;
      out.formulas.brackets[{i, j}] = f;
    }
  }
  out.report.add(indep);
  out.report.add(formulas);
  out.report.add(in_l);

  Table t{"bracket table", {}};
  for (const auto& [ij, v] : out.constant_extension.brackets) {
    t.entries.emplace_back("[" + basis_name(c, ij.first) + "," + basis_name(c, ij.second) + "]", coefficient_list(v));
  }
  out.report.add_table(t);
  return out;
}

// ---------------------------------------------------------------- linear model

LinearModel linear_model(const LeafPresentation& pres) {
  const Chart& c = pres.chart();
  LinearModel m;
  m.chart = c;
  auto d0 = [&](const Expr& f, int k) { return at_leaf(expr::differentiate(f, c.name(k)), c); };
  for (int u : c.transverse()) {
    for (int a : c.leaf()) {
      for (int k : c.leaf()) {
        const Expr g = d0(pres.split.a(a, u), k);
        if (!g.is_zero()) m.gamma[{a, u, k}] = g;
      }
    }
  }
  for (int a : c.leaf()) {
    for (int b : c.leaf()) {
      if (b <= a) continue;
      for (int k : c.leaf()) {
        const Expr g = d0(pres.b.get(bit(a) | bit(b)), k);
        if (!g.is_zero()) m.c[{a, b, k}] = g;
      }
    }
  }
  for (int u : c.transverse()) {
    for (int v : c.transverse()) {
      if (v <= u) continue;
      const Expr w = pres.alpha.get(bit(u) | bit(v));
      const Expr w0 = at_leaf(w, c);
      if (!w0.is_zero()) m.varpi[{u, v}] = w0;
      for (int k : c.leaf()) {
        const Expr g = d0(w, k);
        if (!g.is_zero()) m.r[{u, v, k}] = g;
      }
    }
  }
  return m;
}

LeafPresentation LinearModel::presentation() const {
  std::map<std::pair<int, int>, Expr> a;
  for (const auto& [key, g] : gamma) {
    const auto [b, u, k] = key;
    a[{b, u}] += g * chart.coord(k);
  }
  Multivector bb(chart, 2);
  for (const auto& [key, g] : c) {
    const auto [x, y, k] = key;
    bb.add_to(bit(x) | bit(y), g * chart.coord(k));
  }
  Form alpha(chart, 2);
  for (const auto& [key, w] : varpi) alpha.add_to(bit(key.first) | bit(key.second), w);
  for (const auto& [key, g] : r) {
    const auto [u, v, k] = key;
    alpha.add_to(bit(u) | bit(v), g * chart.coord(k));
  }
  return {FrameSplit(chart, a), bb, alpha, {}};
}

DiracFrame linearize(const LeafPresentation& pres) {
  DiracFrame l = coupling::reconstruct(linear_model(pres).presentation().data());
  l.origin = courant::Origin::Linearized;
  return l;
}

Report check_linear_approximation(const LeafPresentation& pres, const LinearModel& model, const SampleConfig& cfg) {
  const Chart& c = pres.chart();
  if (!(model.chart == c)) throw ChartMismatchError();
  const auto mine = coefficients(pres);
  const auto theirs = coefficients(model.presentation());
  Check ch = make_check("linear-approximation", "coefficients and their first normal derivatives agree on S");
  for (std::size_t i = 0; i < mine.size(); ++i) {
    const Expr diff = mine[i].second - theirs[i].second;
    const std::string& name = mine[i].first;
    absorb(ch, expr::classify_zero(at_leaf(diff, c), cfg), {{"coefficient", name}}, name + " on S");
    for (int k : c.leaf()) {
      absorb(ch, expr::classify_zero(at_leaf(expr::differentiate(diff, c.name(k)), c), cfg), {{"coefficient", name}},
             "d/d" + c.name(k) + " " + name + " on S");
    }
  }
  Report r;
  r.add(ch);
  return r;
}

// ---------------------------------------------------------------- reducibility

Report reducible_normal_form_check(const DiracFrame& l, const SampleConfig& cfg) {
  const Chart& c = l.chart;
  const auto nn = static_cast<std::size_t>(c.n());
  Report r;
  Check rank = make_check("constant-kernel-rank", "dim (L cap TM) is the same at every sample point");
  const auto pts = courant::sample_points(c, l.coefficients(), cfg, {}, true);
  std::vector<QMatrix> kernels;
  for (const auto& p : pts.points) {
    const auto cd = courant::characteristic_data_at(l, p);
    kernels.push_back(linalg::rref(cd.kernel, nn).rows);
    if (kernels.back().size() != kernels.front().size() && rank.status == Status::Pass) {
      rank.status = Status::Fail;
      rank.witnesses.push_back({point_entries(pts.points.front()), {{"dim K", std::to_string(kernels.front().size())}}});
      rank.witnesses.push_back({point_entries(p), {{"dim K", std::to_string(kernels.back().size())}}});
    }
  }
  if (pts.exhausted && rank.status == Status::Pass) {
    rank.status = Status::Unknown;
    rank.note = "too many singular sample points";
  }
  r.add(rank);
  if (rank.status != Status::Pass || kernels.empty()) return r;

  Check coord = make_check("coordinate-kernel", "K is spanned by coordinate fields d/dz");
  std::vector<int> z;
  for (const auto& row : kernels.front()) {
    int nonzero = 0;
    int at = -1;
    for (std::size_t i = 0; i < nn; ++i) {
      if (row[i] != 0) {
        ++nonzero;
        at = static_cast<int>(i);
      }
    }
    if (nonzero != 1) {
      coord.status = Status::Unknown;
      coord.note = "K is not spanned by coordinate fields in this chart";
      break;
    }
    z.push_back(at);
  }
  for (std::size_t k = 1; k < kernels.size() && coord.status == Status::Pass; ++k) {
    if (kernels[k] != kernels.front()) {
      coord.status = Status::Unknown;
      coord.note = "K is not spanned by the same coordinate fields at every sample point";
    }
  }
  if (coord.status == Status::Pass) {
    std::string names;
    for (int i : z) names += (names.empty() ? "" : ",") + c.name(i);
    coord.note = z.empty() ? "K = 0" : "K = span d/d{" + names + "}";
  }
  r.add(coord);
  if (coord.status != Status::Pass) return r;

  Check inv = make_check("z-independence", "(d/dz, 0) lies in L and L is invariant under the flow of d/dz");
  for (int zi : z) {
    const Section dz(cartan::partial(c, zi), Form(c, 1));
    for (std::size_t j = 0; j < l.sections.size(); ++j) {
      const std::string lj = "l" + std::to_string(j + 1);
      absorb(inv, expr::classify_zero(courant::g(dz, l.sections[j]), cfg), {{"z", c.name(zi)}, {"section", lj}},
             "g(d/dz, l)");
      const Section moved(cartan::lie_bracket(dz.vector, l.sections[j].vector),
                          cartan::lie_derivative(dz.vector, l.sections[j].form));
      for (std::size_t k = 0; k < l.sections.size(); ++k) {
        const std::string lk = "l" + std::to_string(k + 1);
        absorb(inv, expr::classify_zero(courant::g(moved, l.sections[k]), cfg),
               {{"z", c.name(zi)}, {"sections", lj + "," + lk}}, "g(L_z l_j, l_k)");
      }
    }
  }
  r.add(inv);
  return r;
}

}  // namespace dirac::leafline
