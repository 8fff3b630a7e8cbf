#include "dirac/cartan.hpp"

#include <algorithm>
#include <bit>
#include <set>
#include <sstream>

#include "dirac/errors.hpp"

namespace dirac::cartan {

Chart::Chart(std::vector<std::string> coords, const std::vector<std::string>& leaf) : coords_(std::move(coords)) {
  if (coords_.size() > 31) throw Error("charts are limited to 31 coordinates");
  std::set<std::string> seen;
  for (const auto& c : coords_) {
    if (!seen.insert(c).second) throw Error("duplicate coordinate \"" + c + "\"");
  }
  for (const auto& l : leaf) {
    const int i = index_of(l);
    if (leaf_mask_ >> i & 1U) throw Error("duplicate leaf coordinate \"" + l + "\"");
    leaf_mask_ |= Mask{1} << i;
  }
  for (int i = 0; i < n(); ++i) (is_leaf(i) ? leaf_ : transverse_).push_back(i);
}

int Chart::index_of(const std::string& name) const {
  auto it = std::find(coords_.begin(), coords_.end(), name);
  if (it == coords_.end()) throw UnknownSymbolError(name);
  return static_cast<int>(it - coords_.begin());
}

std::vector<int> mask_indices(Mask m) {
  std::vector<int> out;
  while (m != 0) {
    out.push_back(std::countr_zero(m));
    m &= m - 1;
  }
  return out;
}

int popcount(Mask m) { return std::popcount(m); }

int merge_sign(Mask a, Mask b) {
  int inversions = 0;
  for (int i : mask_indices(a)) inversions += std::popcount(b & ((Mask{1} << i) - 1));
  return inversions % 2 == 0 ? 1 : -1;
}

namespace {

// Sign and mask of dx^{i_1} ^ ... ^ dx^{i_k}; sign 0 on a repeated index.
std::pair<int, Mask> signed_mask(const std::vector<int>& indices) {
  int sign = 1;
  Mask m = 0;
  for (int i : indices) {
    const Mask bit = Mask{1} << i;
    if (m & bit) return {0, 0};
    // moving dx^i past the larger indices already present
    if (std::popcount(m & ~((bit << 1) - 1)) % 2 != 0) sign = -sign;
    m |= bit;
  }
  return {sign, m};
}

void require_same_chart(const Chart& a, const Chart& b) {
  if (!(a == b)) throw ChartMismatchError();
}

std::string index_label(const Chart& c, Mask m, bool vector) {
  std::string out;
  for (int i : mask_indices(m)) {
    if (!out.empty()) out += "^";
    out += (vector ? "d_" : "d") + c.name(i);
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------- Alternating

template <class Tag>
Alternating<Tag>::Alternating(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
  // Degrees above n are allowed; such tensors have no components.
  if (degree < 0) throw DegreeError("negative degree");
}

template <class Tag>
Alternating<Tag> Alternating<Tag>::basis(const Chart& chart, const std::vector<int>& indices) {
  Alternating out(chart, static_cast<int>(indices.size()));
  auto [sign, m] = signed_mask(indices);
  if (sign != 0) out.set(m, Expr(sign));
  return out;
}

template <class Tag>
Alternating<Tag> Alternating<Tag>::from_components(const Chart& chart, const std::vector<Expr>& comps) {
  Alternating out(chart, 1);
  for (std::size_t i = 0; i < comps.size(); ++i) out.set(Mask{1} << i, comps[i]);
  return out;
}

template <class Tag>
Alternating<Tag> Alternating<Tag>::scalar(const Chart& chart, const Expr& f) {
  Alternating out(chart, 0);
  out.set(0, f);
  return out;
}

template <class Tag>
Expr Alternating<Tag>::get(Mask m) const {
  auto it = comps_.find(m);
  return it == comps_.end() ? Expr(0) : it->second;
}

template <class Tag>
Expr Alternating<Tag>::get(std::vector<int> indices) const {
  auto [sign, m] = signed_mask(indices);
  if (sign == 0) return Expr(0);
  Expr v = get(m);
  return sign > 0 ? v : -v;
}

template <class Tag>
void Alternating<Tag>::set(Mask m, const Expr& v) {
  if (popcount(m) != degree_) throw DegreeError("component index set has the wrong size");
  if (v.is_zero()) {
    comps_.erase(m);
  } else {
    comps_[m] = v;
  }
}

template <class Tag>
void Alternating<Tag>::add_to(Mask m, const Expr& v) {
  if (v.is_zero()) return;
  set(m, get(m) + v);
}

template <class Tag>
Alternating<Tag> Alternating<Tag>::operator-() const {
  return map([](const Expr& e) { return -e; });
}

template <class Tag>
Alternating<Tag> Alternating<Tag>::operator+(const Alternating& o) const {
  require_same_chart(chart_, o.chart_);
  if (degree_ != o.degree_) throw DegreeError("sum of tensors of different degrees");
  Alternating out = *this;
  for (const auto& [m, v] : o.comps_) out.add_to(m, v);
  return out;
}

template <class Tag>
Alternating<Tag> Alternating<Tag>::operator-(const Alternating& o) const {
  return *this + (-o);
}

template <class Tag>
Alternating<Tag> Alternating<Tag>::operator*(const Expr& f) const {
  return map([&f](const Expr& e) { return e * f; });
}

template <class Tag>
bool Alternating<Tag>::equals(const Alternating& o) const {
  if (!(chart_ == o.chart_) || degree_ != o.degree_) return false;
  return (*this - o).is_zero();
}

template <class Tag>
std::string Alternating<Tag>::str() const {
  if (comps_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& [m, v] : comps_) {
    if (!first) os << " + ";
    first = false;
    if (m == 0) {
      os << v.str();
    } else {
      os << '(' << v.str() << ")*" << index_label(chart_, m, std::is_same_v<Tag, VectorTag>);
    }
  }
  return os.str();
}

template <class Tag>
Alternating<Tag> wedge(const Alternating<Tag>& a, const Alternating<Tag>& b) {
  require_same_chart(a.chart(), b.chart());
  if (a.degree() + b.degree() > a.chart().n()) throw DegreeError("wedge product exceeds the chart dimension");
  Alternating<Tag> out(a.chart(), a.degree() + b.degree());
  for (const auto& [ma, va] : a.components())
    for (const auto& [mb, vb] : b.components()) {
      if (ma & mb) continue;
      const Expr v = va * vb;
      out.add_to(ma | mb, merge_sign(ma, mb) > 0 ? v : -v);
    }
  return out;
}

template class Alternating<FormTag>;
template class Alternating<VectorTag>;
template Form wedge(const Form&, const Form&);
template Multivector wedge(const Multivector&, const Multivector&);

// ---------------------------------------------------------------- operations

Expr contract(const Form& w, const Multivector& p) {
  require_same_chart(w.chart(), p.chart());
  if (w.degree() != p.degree()) throw DegreeError("contraction of tensors of different degrees");
  Expr out;
  for (const auto& [m, v] : w.components()) {
    const Expr pv = p.get(m);
    if (!pv.is_zero()) out += v * pv;
  }
  return out;
}

Expr evaluate_form(const Form& w, const std::vector<Multivector>& vectors) {
  Multivector prod = Multivector::scalar(w.chart(), Expr(1));
  for (const auto& x : vectors) prod = wedge(prod, x);
  return contract(w, prod);
}

Expr evaluate_multivector(const Multivector& p, const std::vector<Form>& forms) {
  Form prod = Form::scalar(p.chart(), Expr(1));
  for (const auto& a : forms) prod = wedge(prod, a);
  return contract(prod, p);
}

namespace {

template <class Out, class In>
Out interior_impl(const Alternating<typename std::conditional_t<std::is_same_v<Out, Form>, VectorTag, FormTag>>& x,
                  const In& w) {
  require_same_chart(x.chart(), w.chart());
  if (x.degree() != 1) throw DegreeError("interior product needs a degree-1 argument");
  if (w.degree() == 0) throw DegreeError("interior product of a degree-0 tensor");
  Out out(w.chart(), w.degree() - 1);
  for (const auto& [m, v] : w.components()) {
    const auto idx = mask_indices(m);
    for (std::size_t r = 0; r < idx.size(); ++r) {
      const Expr xi = x[idx[r]];
      if (xi.is_zero()) continue;
      const Expr term = xi * v;
      out.add_to(m & ~(Mask{1} << idx[r]), r % 2 == 0 ? term : -term);
    }
  }
  return out;
}

}  // namespace

Form interior(const Multivector& x, const Form& w) { return interior_impl<Form, Form>(x, w); }

Multivector interior(const Form& a, const Multivector& p) { return interior_impl<Multivector, Multivector>(a, p); }

Form ext_d(const Form& w) {
  const Chart& c = w.chart();
  Form out(c, w.degree() + 1);
  for (const auto& [m, v] : w.components())
    for (int j = 0; j < c.n(); ++j) {
      const Mask bit = Mask{1} << j;
      if (m & bit) continue;
      const Expr dv = expr::differentiate(v, c.name(j));
      if (dv.is_zero()) continue;
      out.add_to(m | bit, merge_sign(bit, m) > 0 ? dv : -dv);
    }
  return out;
}

Expr apply(const Multivector& x, const Expr& f) {
  Expr out;
  for (const auto& [m, v] : x.components()) {
    const Expr df = expr::differentiate(f, x.chart().name(std::countr_zero(m)));
    if (!df.is_zero()) out += v * df;
  }
  return out;
}

Form differential(const Chart& chart, const Expr& f) { return ext_d(Form::scalar(chart, f)); }

Multivector partial(const Chart& chart, int i) { return Multivector::basis(chart, {i}); }

Form dx(const Chart& chart, int i) { return Form::basis(chart, {i}); }

Multivector lie_bracket(const Multivector& x, const Multivector& y) {
  require_same_chart(x.chart(), y.chart());
  if (x.degree() != 1 || y.degree() != 1) throw DegreeError("Lie bracket of vector fields needs degree 1");
  Multivector out(x.chart(), 1);
  for (int i = 0; i < x.chart().n(); ++i) out.set(Mask{1} << i, apply(x, y[i]) - apply(y, x[i]));
  return out;
}

Form lie_derivative(const Multivector& x, const Form& w) {
  require_same_chart(x.chart(), w.chart());
  if (w.degree() == 0) return Form::scalar(w.chart(), apply(x, w.get(Mask{0})));
  Form out = w.degree() < w.chart().n() ? interior(x, ext_d(w)) : Form(w.chart(), w.degree());
  return out + ext_d(interior(x, w));
}

Multivector lie_derivative(const Multivector& x, const Multivector& p) {
  require_same_chart(x.chart(), p.chart());
  const Chart& c = x.chart();
  Multivector out(c, p.degree());
  // d_i X^j, used by [X, d_i] = -sum_j (d_i X^j) d_j
  std::vector<std::vector<Expr>> dx_table(static_cast<std::size_t>(c.n()));
  for (int i = 0; i < c.n(); ++i)
    for (int j = 0; j < c.n(); ++j) dx_table[static_cast<std::size_t>(i)].push_back(expr::differentiate(x[j], c.name(i)));
  for (const auto& [m, v] : p.components()) {
    out.add_to(m, apply(x, v));
    const auto idx = mask_indices(m);
    for (std::size_t r = 0; r < idx.size(); ++r)
      for (int j = 0; j < c.n(); ++j) {
        const Expr& d = dx_table[static_cast<std::size_t>(idx[r])][static_cast<std::size_t>(j)];
        if (d.is_zero()) continue;
        auto replaced = idx;
        replaced[r] = j;
        auto [sign, mm] = signed_mask(replaced);
        if (sign == 0) continue;
        const Expr term = v * d;
        out.add_to(mm, sign > 0 ? -term : term);
      }
  }
  return out;
}

Multivector schouten_bracket(const Multivector& p, const Multivector& q) {
  require_same_chart(p.chart(), q.chart());
  if (p.degree() != 2 || q.degree() != 2) throw DegreeError("Schouten bracket is implemented for bivectors");
  const Chart& c = p.chart();
  const int n = c.n();
  Multivector out(c, 3);
  if (n < 3) return out;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        Expr total;
        const int cyc[3][3] = {{i, j, k}, {j, k, i}, {k, i, j}};
        for (const auto& t : cyc)
          for (int l = 0; l < n; ++l) {
            const Expr plc = p.get({l, t[2]});
            if (!plc.is_zero()) total += plc * expr::differentiate(q.get({t[0], t[1]}), c.name(l));
            const Expr qlc = q.get({l, t[2]});
            if (!qlc.is_zero()) total += qlc * expr::differentiate(p.get({t[0], t[1]}), c.name(l));
          }
        out.set((Mask{1} << i) | (Mask{1} << j) | (Mask{1} << k), total);
      }
  return out;
}

Multivector sharp(const Multivector& p, const Form& a) { return interior(a, p); }

Form flat(const Form& s, const Multivector& x) { return interior(x, s); }

template <class Tag>
TensorVerdict classify_zero(const Alternating<Tag>& t, const expr::SampleConfig& cfg) {
  TensorVerdict out;
  out.verdict.status = expr::ZeroVerdict::Status::Zero;
  for (const auto& [m, v] : t.components()) {
    expr::ZeroVerdict z = expr::classify_zero(v, cfg);
    if (z.status == expr::ZeroVerdict::Status::NonZero) return {z, m};
    if (z.status == expr::ZeroVerdict::Status::Unknown ||
        (z.status == expr::ZeroVerdict::Status::SampledZero && out.verdict.status == expr::ZeroVerdict::Status::Zero)) {
      out = {z, m};
    }
  }
  return out;
}

template TensorVerdict classify_zero(const Form&, const expr::SampleConfig&);
template TensorVerdict classify_zero(const Multivector&, const expr::SampleConfig&);

// ---------------------------------------------------------------- FrameSplit

FrameSplit::FrameSplit(Chart chart) : chart_(std::move(chart)) {}

FrameSplit::FrameSplit(Chart chart, std::map<std::pair<int, int>, Expr> a) : chart_(std::move(chart)) {
  for (auto& [key, v] : a) {
    if (!chart_.is_leaf(key.first) || chart_.is_leaf(key.second)) {
      throw Error("normal-bundle coefficients are indexed by (leaf, transverse) coordinates");
    }
    if (!v.is_zero()) a_.emplace(key, v);
  }
}

Expr FrameSplit::a(int leaf_index, int transverse_index) const {
  auto it = a_.find({leaf_index, transverse_index});
  return it == a_.end() ? Expr(0) : it->second;
}

Multivector FrameSplit::frame(int i) const {
  Multivector v = partial(chart_, i);
  if (chart_.is_leaf(i)) return v;
  for (int b : chart_.leaf()) v.add_to(Mask{1} << b, a(b, i));
  return v;
}

Form FrameSplit::coframe(int i) const {
  Form f = dx(chart_, i);
  if (!chart_.is_leaf(i)) return f;
  for (int u : chart_.transverse()) f.add_to(Mask{1} << u, -a(i, u));
  return f;
}

Form FrameSplit::frame_components(const Form& w) const {
  Form out(chart_, w.degree());
  if (w.is_zero()) return out;
  const int n = chart_.n();
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    if (popcount(m) != w.degree()) continue;
    std::vector<Multivector> vs;
    for (int i : mask_indices(m)) vs.push_back(frame(i));
    out.set(m, evaluate_form(w, vs));
  }
  return out;
}

Form FrameSplit::assemble(const Form& frame_comps) const {
  Form out(chart_, frame_comps.degree());
  for (const auto& [m, v] : frame_comps.components()) {
    Form b = Form::scalar(chart_, v);
    for (int i : mask_indices(m)) b = wedge(b, coframe(i));
    out = out + b;
  }
  return out;
}

Multivector FrameSplit::frame_components(const Multivector& p) const {
  Multivector out(chart_, p.degree());
  if (p.is_zero()) return out;
  const int n = chart_.n();
  for (Mask m = 0; m < (Mask{1} << n); ++m) {
    if (popcount(m) != p.degree()) continue;
    std::vector<Form> fs;
    for (int i : mask_indices(m)) fs.push_back(coframe(i));
    out.set(m, evaluate_multivector(p, fs));
  }
  return out;
}

Multivector FrameSplit::assemble(const Multivector& frame_comps) const {
  Multivector out(chart_, frame_comps.degree());
  for (const auto& [m, v] : frame_comps.components()) {
    Multivector b = Multivector::scalar(chart_, v);
    for (int i : mask_indices(m)) b = wedge(b, frame(i));
    out = out + b;
  }
  return out;
}

std::pair<int, int> FrameSplit::bidegree(Mask m) const {
  int leaf = 0;
  for (int i : mask_indices(m)) leaf += chart_.is_leaf(i) ? 1 : 0;
  return {popcount(m) - leaf, leaf};
}

Form FrameSplit::part(const Form& w, int transverse, int leaf) const {
  Form comps = frame_components(w);
  Form kept(chart_, w.degree());
  for (const auto& [m, v] : comps.components())
    if (bidegree(m) == std::make_pair(transverse, leaf)) kept.set(m, v);
  return assemble(kept);
}

BigradedD bigraded_d(const Form& w, const FrameSplit& split) {
  const Chart& c = split.chart();
  require_same_chart(c, w.chart());
  const int k = w.degree();
  BigradedD out{Form(c, k + 1), Form(c, k + 1), Form(c, k + 1), Form(c, k + 1)};
  const Form comps = split.frame_components(w);
  std::map<std::pair<int, int>, Form> pure;
  for (const auto& [m, v] : comps.components()) {
    auto [it, inserted] = pure.try_emplace(split.bidegree(m), c, k);
    it->second.set(m, v);
  }
  for (const auto& [bd, pc] : pure) {
    const Form d = ext_d(split.assemble(pc));
    const Form dc = split.frame_components(d);
    Form dp(c, k + 1);
    Form ddp(c, k + 1);
    Form dpart(c, k + 1);
    Form rest(c, k + 1);
    for (const auto& [m, v] : dc.components()) {
      const auto b = split.bidegree(m);
      if (b == std::make_pair(bd.first + 1, bd.second)) {
        dp.set(m, v);
      } else if (b == std::make_pair(bd.first, bd.second + 1)) {
        ddp.set(m, v);
      } else if (b == std::make_pair(bd.first + 2, bd.second - 1)) {
        dpart.set(m, v);
      } else {
        rest.set(m, v);
      }
    }
    out.d_prime = out.d_prime + split.assemble(dp);
    out.d_double_prime = out.d_double_prime + split.assemble(ddp);
    out.partial = out.partial + split.assemble(dpart);
    out.remainder = out.remainder + split.assemble(rest);
  }
  return out;
}

}  // namespace dirac::cartan
