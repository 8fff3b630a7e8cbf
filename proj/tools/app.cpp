#include "app.hpp"

#include <json.hpp>

#include <iostream>
#include <map>
#include <set>
#include <sstream>

#include "dirac/leafline.hpp"
#include "dirac/linalg.hpp"

namespace dirac::cli {

using cartan::Chart;
using cartan::Form;
using cartan::Multivector;
using courant::DiracFrame;
using courant::Section;
using expr::Expr;
using expr::SampleConfig;
using expr::Scalar;

int exit_code(Status s) {
  switch (s) {
    case Status::Pass:
      return 0;
    case Status::Unknown:
      return 2;
    case Status::Fail:
    case Status::Invalid:
      return 1;
  }
  return 1;
}

namespace {

Check make_check(const std::string& id, const std::string& anchor) {
  Check c;
  c.id = id;
  c.anchor = anchor;
  return c;
}

// Checks of a derived structure get a prefix so ids stay unique.
void append_prefixed(Report& into, const Report& from, const std::string& prefix) {
  for (Check c : from.checks()) {
    c.id = prefix + c.id;
    into.add(std::move(c));
  }
  for (Table t : from.tables()) {
    t.name = prefix + t.name;
    into.add_table(std::move(t));
  }
}

void invalid(Report& r, const std::string& id, const std::string& anchor, const std::string& why) {
  Check c = make_check(id, anchor);
  c.status = Status::Invalid;
  c.note = why;
  r.add(std::move(c));
}

std::string pair_name(const Chart& c, cartan::Mask m) {
  const auto idx = cartan::mask_indices(m);
  std::string s;
  for (int i : idx) s += (s.empty() ? "" : ",") + c.name(i);
  return s;
}

Table form_table(const std::string& name, const std::string& symbol, const Form& w) {
  Table t{name, {}};
  for (const auto& [m, v] : w.components()) t.entries.emplace_back(symbol + "(" + pair_name(w.chart(), m) + ")", v.str());
  return t;
}

Table multivector_table(const std::string& name, const std::string& symbol, const Multivector& p) {
  Table t{name, {}};
  for (const auto& [m, v] : p.components()) t.entries.emplace_back(symbol + "(" + pair_name(p.chart(), m) + ")", v.str());
  return t;
}

SampleConfig effective_samples(const Document& doc, const Options& opts) {
  SampleConfig cfg = doc.samples;
  if (opts.samples) {
    if (*opts.samples <= 0) throw InputError("--samples must be positive", 0);
    cfg.count = *opts.samples;
  }
  if (opts.seed) cfg.seed = *opts.seed;
  if (opts.tol) {
    if (!(*opts.tol > 0)) throw InputError("--tol must be positive", 0);
    cfg.tol = *opts.tol;
  }
  if (opts.box) {
    Scalar b;
    try {
      b = Scalar(*opts.box);
      b.canonicalize();
    } catch (const std::invalid_argument&) {
      throw InputError("--box expects a rational number such as 1 or 1/2", 0);
    }
    if (b <= 0) throw InputError("--box must be positive", 0);
    cfg.box = b;
  }
  return cfg;
}

const Structure& select(const Document& doc, const Options& opts) {
  if (!opts.structure) return doc.structures.front();
  for (const auto& s : doc.structures) {
    if (s.name == *opts.structure) return s;
  }
  throw InputError("no structure named \"" + *opts.structure + "\"", 0);
}

void require_exact(const Document& doc, const Structure& s) {
  for (const auto& e : s.frame.coefficients()) {
    if (e.has_transcendental()) {
      throw InputError("structure \"" + s.name + "\" has transcendental coefficients (--exact-only)", 0);
    }
  }
  if (doc.metric) {
    for (const auto& row : doc.metric->g()) {
      for (const auto& e : row) {
        if (e.has_transcendental()) throw InputError("the metric has transcendental coefficients (--exact-only)", 0);
      }
    }
  }
}

// Same fiber as l at every sample point where both frames are regular.
Check same_span(const std::string& id, const std::string& anchor, const DiracFrame& l, const DiracFrame& m,
                const SampleConfig& cfg) {
  Check c = make_check(id, anchor);
  std::vector<Expr> coeffs = l.coefficients();
  const auto more = m.coefficients();
  coeffs.insert(coeffs.end(), more.begin(), more.end());
  const auto pts = courant::sample_points(l.chart, coeffs, cfg);
  const auto width = static_cast<std::size_t>(2 * l.chart.n());
  for (const auto& p : pts.points) {
    const auto a = courant::fiber_at(l, p);
    const auto b = courant::fiber_at(m, p);
    if (!a.exact || !b.exact) c.exact = false;
    if (!linalg::row_space_equal(a.rows, b.rows, width)) {
      c.status = Status::Fail;
      if (c.witnesses.size() < 4) {
        c.witnesses.push_back({point_entries(p), {{"rank", std::to_string(a.rows.size())},
                                                  {"rank of the other frame", std::to_string(b.rows.size())}}});
      }
    }
  }
  if (pts.exhausted && c.status == Status::Pass) {
    c.status = Status::Unknown;
    c.note = "too many singular sample points";
  }
  return c;
}

Expr default_function(const Chart& c) {
  const Expr first = c.coord(0);
  const Expr last = c.coord(c.n() - 1);
  return first * first * last + first;
}

Report axiom_suite(const Structure& s, const SampleConfig& cfg) {
  const Chart& c = s.frame.chart;
  const Expr f = s.function ? *s.function : default_function(c);
  std::vector<Section> sections = s.frame.sections;
  for (std::size_t i = 0; sections.size() < 3 && i < s.frame.sections.size(); ++i) {
    sections.push_back(s.frame.sections[i] * (f + Expr(1)));
  }
  Report r;
  if (sections.size() < 3) {
    invalid(r, "courant-axioms", "Courant algebroid axioms on the frame sections", "the frame has no sections");
    return r;
  }
  return courant::check_courant_axioms(sections, f, cfg);
}

Report verify(const Structure& s, const SampleConfig& cfg) {
  Report r = courant::check_dirac(s.frame, cfg);
  r.append(courant::check_leaf_parity(s.frame, cfg));
  r.append(axiom_suite(s, cfg));
  return r;
}

void add_data_tables(Report& r, const coupling::GeometricData& data, bool with_h = true) {
  const Chart& c = data.split.chart();
  if (with_h) {
    Table a{"H frame", {}};
    for (int u : c.transverse()) {
      for (int b : c.leaf()) a.entries.emplace_back("A(" + c.name(b) + "," + c.name(u) + ")", data.split.a(b, u).str());
    }
    r.add_table(a);
  }
  r.add_table(form_table("sigma", "sigma", data.sigma));
  r.add_table(multivector_table("Pi", "Pi", data.pi));
}

Report coupling_command(const Structure& s, const SampleConfig& cfg) {
  Report r;
  if (s.data) {
    r.append(coupling::check_integrability(*s.data, cfg));
    add_data_tables(r, *s.data);
    append_prefixed(r, coupling::is_coupling(s.frame, cfg), "reconstruction.");
    append_prefixed(r, courant::check_dirac(s.frame, cfg), "reconstruction.");
    return r;
  }
  r.append(coupling::normal_distribution(s.frame, cfg));
  const Report coupled = coupling::is_coupling(s.frame, cfg);
  r.append(coupled);
  if (coupled.status_of("coupling") != Status::Pass) {
    invalid(r, "geometric-data", "geometric data (H, sigma, Pi) of a coupling structure", "L is not coupling");
    return r;
  }
  coupling::GeometricData data;
  try {
    data = coupling::extract_geometric_data(s.frame, cfg);
  } catch (const PreconditionError& e) {
    invalid(r, "geometric-data", "geometric data (H, sigma, Pi) of a coupling structure", e.what());
    return r;
  }
  add_data_tables(r, data, false);  // is_coupling already lists H
  r.append(coupling::check_integrability(data, cfg));
  if (s.kind == Kind::Poisson) {
    r.append(coupling::check_integrability_poisson(*s.frame.bivector, data.split, cfg));
  } else if (s.kind == Kind::Presymplectic) {
    r.append(coupling::check_integrability_presymplectic(*s.frame.two_form, data.split, cfg));
  } else {
    r.append(coupling::check_integrability_almost_coupling(s.frame, data.split, cfg));
  }
  r.add(same_span("round-trip", "the reconstruction from (H, sigma, Pi) spans L", s.frame, coupling::reconstruct(data),
                  cfg));
  return r;
}

Report linearize_command(const Structure& s, const SampleConfig& cfg, std::string& emitted) {
  Report r;
  leafline::LeafPresentation pres;
  try {
    pres = s.data ? leafline::dw_coefficients(*s.data, cfg) : leafline::dw_coefficients(s.frame, cfg);
  } catch (const PreconditionError& e) {
    invalid(r, "leaf-presentation", "coefficients (A, B, alpha) of L near the leaf y = 0", e.what());
    return r;
  }
  r.append(pres.report);
  const leafline::LeafAlgebroid algebroid = leafline::leaf_algebroid(pres, cfg);
  r.append(algebroid.report);
  const leafline::LinearModel model = leafline::linear_model(pres);
  r.append(leafline::check_linear_approximation(pres, model, cfg));
  const coupling::GeometricData linear = model.presentation().data();
  append_prefixed(r, coupling::check_integrability(linear, cfg), "linear.");
  append_prefixed(r, courant::check_dirac(leafline::linearize(pres), cfg), "linear.");
  add_data_tables(r, linear);
  emitted = structure_block(s.name + "_linear", linear);
  return r;
}

// Tangent parts of the frame along N; they lie in A_N when N is properly normalized.
std::vector<std::pair<std::size_t, Section>> tangent_sections(const DiracFrame& l, const submanifold::Normalized& n) {
  std::vector<std::pair<std::size_t, Section>> out;
  for (std::size_t i = 0; i < l.sections.size(); ++i) {
    const Section t = n.restrict(n.tangent_part(l.sections[i]));
    if (!t.vector.is_zero() || !t.form.is_zero()) out.emplace_back(i, t);
  }
  return out;
}

void fold(Check& into, const Check& c, const std::string& pair) {
  into.status = worst(into.status, c.status);
  if (!c.exact) into.exact = false;
  if (into.note.empty()) into.note = c.note;
  for (Witness w : c.witnesses) {
    if (into.witnesses.size() >= 4) break;
    w.values.insert(w.values.begin(), {"pair", pair});
    into.witnesses.push_back(std::move(w));
  }
}

void second_fundamental_form_checks(Report& r, const DiracFrame& l, const submanifold::Normalized& n,
                                    const SampleConfig& cfg) {
  const auto parts = tangent_sections(l, n);
  const Chart& c = l.chart;
  std::map<std::string, Check> agg;
  std::vector<std::string> order;
  Table b{"second fundamental form", {}};
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t j = i + 1; j < parts.size(); ++j) {
      const std::string pair = "l" + std::to_string(parts[i].first + 1) + ",l" + std::to_string(parts[j].first + 1);
      try {
        const auto sff = submanifold::second_fundamental_form(l, n, parts[i].second, parts[j].second, cfg);
        for (const auto& k : sff.report.checks()) {
          auto [it, fresh] = agg.try_emplace("sff." + k.id, make_check("sff." + k.id, k.anchor));
          if (fresh) order.push_back(it->first);
          fold(it->second, k, pair);
        }
        for (const auto& [m, v] : sff.gauss.components()) {
          b.entries.emplace_back("B(" + pair + ")(d/d" + pair_name(c, m) + ")", v.str());
        }
      } catch (const PreconditionError& e) {
        auto [it, fresh] = agg.try_emplace("sff.sections", make_check("sff.sections", "tangent parts lie in A_N"));
        if (fresh) order.push_back(it->first);
        it->second.status = worst(it->second.status, Status::Unknown);
        it->second.note = e.what();
      }
    }
  }
  for (const auto& id : order) r.add(agg.at(id));
  r.add_table(b);
}

Report submanifold_command(const Document& doc, const Structure& s, const SampleConfig& cfg) {
  if (!doc.submanifold) throw InputError("the submanifold command needs a submanifold block", 0);
  const submanifold::Normalized n(doc.chart, doc.submanifold->zero);
  const DiracFrame& l = s.frame;
  Report r = submanifold::kernel_and_properness(l, n, cfg);
  const Report verdicts = submanifold::cosymplectic_verdicts(l, n, cfg);
  r.add(*verdicts.find("cosymplectic"));
  r.add(*verdicts.find("totally-dirac"));
  if (r.status_of("properly-normalized") != Status::Pass) {
    invalid(r, "induced-structure", "the Dirac structure induced on N", "N is not properly normalized");
    return r;
  }
  try {
    const submanifold::InducedStructure induced = submanifold::induced_structure(l, n, cfg);
    append_prefixed(r, induced.report, "induced.");
    Table t{"induced frame", {}};
    for (std::size_t i = 0; i < induced.frame.sections.size(); ++i) {
      t.entries.emplace_back("l" + std::to_string(i + 1), induced.frame.sections[i].str());
    }
    r.add_table(t);
  } catch (const PreconditionError& e) {
    invalid(r, "induced-structure", "the Dirac structure induced on N", e.what());
  }
  second_fundamental_form_checks(r, l, n, cfg);
  if (doc.metric && l.bivector) {
    append_prefixed(r, submanifold::check_contravariant_derivative(*l.bivector, *doc.metric, cfg), "metric.");
    Check gauss = make_check("metric.gauss-split", "Gauss identities of D^P along N on coordinate coframe pairs");
    const Chart& c = l.chart;
    const auto& tangent = n.tangent();
    bool done = false;
    for (std::size_t i = 0; i < tangent.size() && !done; ++i) {
      for (std::size_t j = 0; j < tangent.size() && !done; ++j) {
        const std::string pair = "dx" + c.name(tangent[i]) + ",dx" + c.name(tangent[j]);
        try {
          const auto split = submanifold::gauss_split(*l.bivector, *doc.metric, n, cartan::dx(c, tangent[i]),
                                                      cartan::dx(c, tangent[j]), cfg);
          for (const auto& k : split.report.checks()) fold(gauss, k, pair);
        } catch (const PreconditionError& e) {
          gauss.status = Status::Invalid;
          gauss.note = e.what();
          done = true;
        }
      }
    }
    r.add(gauss);
  }
  return r;
}

std::string entries_key(std::set<std::string>& used, const std::string& k) {
  std::string key = k;
  for (int i = 2; !used.insert(key).second; ++i) key = k + " (" + std::to_string(i) + ")";
  return key;
}

nlohmann::ordered_json entries_json(const Entries& e) {
  nlohmann::ordered_json out = nlohmann::ordered_json::object();
  std::set<std::string> used;
  for (const auto& [k, v] : e) out[entries_key(used, k)] = v;
  return out;
}

}  // namespace

Outcome execute(const std::string& command, const Document& doc, const Options& opts) {
  Outcome o;
  o.command = command;
  const Structure& s = select(doc, opts);
  o.structure = s.name;
  o.kind = s.kind;
  o.samples = effective_samples(doc, opts);
  if (opts.exact_only) require_exact(doc, s);
  if (command == "verify") {
    o.report = verify(s, o.samples);
  } else if (command == "axioms") {
    o.report = axiom_suite(s, o.samples);
  } else if (command == "coupling") {
    o.report = coupling_command(s, o.samples);
  } else if (command == "linearize") {
    o.report = linearize_command(s, o.samples, o.emitted);
  } else if (command == "submanifold") {
    o.report = submanifold_command(doc, s, o.samples);
  } else {
    throw InputError("unknown command \"" + command + "\"", 0);
  }
  return o;
}

std::string render_json(const Outcome& o) {
  using nlohmann::ordered_json;
  ordered_json j;
  j["format"] = 1;
  j["command"] = o.command;
  j["structure"] = o.structure;
  j["kind"] = to_string(o.kind);
  j["samples"] = {{"count", o.samples.count},
                  {"seed", o.samples.seed},
                  {"box", expr::to_string(o.samples.box)},
                  {"denom", o.samples.denom},
                  {"tol", o.samples.tol}};
  j["status"] = to_string(o.report.status());
  ordered_json checks = ordered_json::array();
  for (const auto& c : o.report.checks()) {
    ordered_json w = ordered_json::array();
    for (const auto& x : c.witnesses) w.push_back({{"point", entries_json(x.point)}, {"values", entries_json(x.values)}});
    checks.push_back({{"id", c.id},
                      {"anchor", c.anchor},
                      {"status", to_string(c.status)},
                      {"exact", c.exact},
                      {"note", c.note},
                      {"witnesses", w}});
  }
  j["checks"] = checks;
  ordered_json tables = ordered_json::array();
  for (const auto& t : o.report.tables()) tables.push_back({{"name", t.name}, {"entries", entries_json(t.entries)}});
  j["tables"] = tables;
  if (!o.emitted.empty()) j["emitted"] = o.emitted;
  return j.dump(2) + "\n";
}

std::string render_text(const Outcome& o) {
  std::ostringstream out;
  out << o.command << " " << o.structure << " (" << to_string(o.kind) << "): " << to_string(o.report.status())
      << "\n";
  const auto join = [](const Entries& e) {
    std::string s;
    for (const auto& [k, v] : e) s += (s.empty() ? "" : ", ") + k + " = " + v;
    return s;
  };
  for (const auto& c : o.report.checks()) {
    out << "  [" << to_string(c.status) << "] " << c.id << ": " << c.anchor;
    if (!c.exact) out << " (sampled)";
    out << "\n";
    if (!c.note.empty()) out << "      note: " << c.note << "\n";
    for (const auto& w : c.witnesses) {
      out << "      at {" << join(w.point) << "}: " << join(w.values) << "\n";
    }
  }
  for (const auto& t : o.report.tables()) {
    out << "  " << t.name << "\n";
    for (const auto& [k, v] : t.entries) out << "      " << k << " = " << v << "\n";
  }
  if (!o.emitted.empty()) out << "\n" << o.emitted;
  return out.str();
}

int run(const std::string& command, const std::string& path, const Options& opts, std::ostream& out,
        std::ostream& err) {
  Outcome o;
  try {
    o = execute(command, read_document(path), opts);
  } catch (const InputError& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  out << (opts.format == Format::Json ? render_json(o) : render_text(o));
  return exit_code(o.report.status());
}

}  // namespace dirac::cli
