#include "input.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace dirac::cli {

using cartan::Chart;
using cartan::Form;
using cartan::Multivector;
using courant::Section;
using expr::Expr;
using expr::Scalar;

std::string to_string(Kind k) {
  switch (k) {
    case Kind::Frame:
      return "frame";
    case Kind::Poisson:
      return "poisson";
    case Kind::Presymplectic:
      return "presymplectic";
    case Kind::GeometricData:
      return "geometric_data";
  }
  return "?";
}

namespace {

struct Token {
  enum class Type { Ident, String, Number, Punct, End };
  Type type;
  std::string text;
  int line;
};

std::vector<Token> tokenize(const std::string& s) {
  std::vector<Token> out;
  int line = 1;
  std::size_t i = 0;
  const auto is_number_char = [](char ch) {
    return std::isdigit(static_cast<unsigned char>(ch)) != 0 || ch == '.' || ch == 'e' || ch == 'E' || ch == '+' ||
           ch == '-' || ch == '/';
  };
  while (i < s.size()) {
    const char ch = s[i];
    if (ch == '\n') {
      ++line;
      ++i;
    } else if (std::isspace(static_cast<unsigned char>(ch)) != 0) {
      ++i;
    } else if (ch == '#') {
      while (i < s.size() && s[i] != '\n') ++i;
    } else if (std::isalpha(static_cast<unsigned char>(ch)) != 0 || ch == '_') {
      std::size_t j = i;
      while (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) != 0 || s[j] == '_')) ++j;
      out.push_back({Token::Type::Ident, s.substr(i, j - i), line});
      i = j;
    } else if (ch == '"') {
      const std::size_t j = s.find('"', i + 1);
      if (j == std::string::npos) throw InputError("unterminated string", line);
      const std::string body = s.substr(i + 1, j - i - 1);
      if (body.find('\n') != std::string::npos) throw InputError("string spans lines", line);
      out.push_back({Token::Type::String, body, line});
      i = j + 1;
    } else if (std::isdigit(static_cast<unsigned char>(ch)) != 0 || ch == '-') {
      std::size_t j = i + 1;
      while (j < s.size() && is_number_char(s[j])) ++j;
      out.push_back({Token::Type::Number, s.substr(i, j - i), line});
      i = j;
    } else if (std::string("{}[]()=,|").find(ch) != std::string::npos) {
      out.push_back({Token::Type::Punct, std::string(1, ch), line});
      ++i;
    } else {
      throw InputError(std::string("unexpected character '") + ch + "'", line);
    }
  }
  out.push_back({Token::Type::End, "end of input", line});
  return out;
}

// Exact value of an integer, a/b or a decimal literal.
std::optional<Scalar> parse_rational(const std::string& text) {
  std::string t = text;
  bool negative = false;
  if (!t.empty() && t[0] == '-') {
    negative = true;
    t = t.substr(1);
  }
  if (t.empty()) return std::nullopt;
  const auto digits = [](const std::string& s) {
    return !s.empty() && s.find_first_not_of("0123456789") == std::string::npos;
  };
  Scalar v;
  if (const auto slash = t.find('/'); slash != std::string::npos) {
    const std::string num = t.substr(0, slash);
    const std::string den = t.substr(slash + 1);
    if (!digits(num) || !digits(den) || mpz_class(den) == 0) return std::nullopt;
    v = Scalar(mpz_class(num), mpz_class(den));
  } else if (const auto dot = t.find('.'); dot != std::string::npos) {
    const std::string whole = t.substr(0, dot);
    const std::string frac = t.substr(dot + 1);
    if (!(whole.empty() || digits(whole)) || !digits(frac)) return std::nullopt;
    mpz_class scale = 1;
    for (std::size_t k = 0; k < frac.size(); ++k) scale *= 10;
    v = Scalar(mpz_class(whole.empty() ? "0" : whole) * scale + mpz_class(frac), scale);
  } else {
    if (!digits(t)) return std::nullopt;
    v = Scalar(mpz_class(t));
  }
  v.canonicalize();
  return negative ? Scalar(-v) : v;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Document document() {
    Document doc;
    bool have_chart = false;
    std::set<std::string> names;
    while (peek().type != Token::Type::End) {
      const Token t = expect_ident();
      if (t.text == "format") {
        expect("=");
        const Token v = next();
        if (v.text != "1") throw InputError("unsupported format \"" + v.text + "\" (expected 1)", v.line);
      } else if (t.text == "chart") {
        if (have_chart) throw InputError("more than one chart block", t.line);
        doc.chart = chart();
        have_chart = true;
      } else if (t.text == "samples") {
        samples(doc.samples);
      } else {
        if (!have_chart) throw InputError("the chart block must come before \"" + t.text + "\"", t.line);
        if (t.text == "structure") {
          Structure s = structure(doc.chart);
          if (!names.insert(s.name).second) throw InputError("duplicate structure \"" + s.name + "\"", t.line);
          doc.structures.push_back(std::move(s));
        } else if (t.text == "submanifold") {
          if (doc.submanifold) throw InputError("more than one submanifold block", t.line);
          doc.submanifold = submanifold_block(doc.chart);
        } else if (t.text == "metric") {
          if (doc.metric) throw InputError("more than one metric block", t.line);
          doc.metric = metric(doc.chart);
        } else {
          throw InputError("unknown block \"" + t.text + "\"", t.line);
        }
      }
    }
    if (!have_chart) throw InputError("missing chart block", 0);
    if (doc.structures.empty()) throw InputError("missing structure block", 0);
    return doc;
  }

 private:
  const Token& peek() const { return toks_[pos_]; }
  Token next() {
    Token t = toks_[pos_];
    if (t.type != Token::Type::End) ++pos_;
    return t;
  }
  bool accept(const std::string& punct) {
    if (peek().type == Token::Type::Punct && peek().text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(const std::string& punct) {
    const Token t = next();
    if (t.type != Token::Type::Punct || t.text != punct) {
      throw InputError("expected '" + punct + "' but found \"" + t.text + "\"", t.line);
    }
  }
  Token expect_ident() {
    Token t = next();
    if (t.type != Token::Type::Ident) throw InputError("expected a name but found \"" + t.text + "\"", t.line);
    return t;
  }
  Token expect_string() {
    Token t = next();
    if (t.type != Token::Type::String) throw InputError("expected a quoted string but found \"" + t.text + "\"", t.line);
    return t;
  }

  std::vector<Token> name_list() {
    expect("[");
    std::vector<Token> out;
    if (accept("]")) return out;
    do {
      out.push_back(expect_ident());
    } while (accept(","));
    expect("]");
    return out;
  }

  static std::vector<std::string> texts(const std::vector<Token>& ts) {
    std::vector<std::string> out;
    for (const auto& t : ts) out.push_back(t.text);
    return out;
  }

  static int index_in(const Chart& c, const Token& t) {
    try {
      return c.index_of(t.text);
    } catch (const UnknownSymbolError&) {
      throw InputError("undeclared coordinate \"" + t.text + "\"", t.line);
    }
  }

  static Expr parse_expr(const Chart& c, const Token& t) {
    try {
      return c.parse(t.text);
    } catch (const Error& e) {
      throw InputError(std::string(e.what()) + " in \"" + t.text + "\"", t.line);
    }
  }

  Chart chart() {
    const int line = peek().line;
    expect("{");
    std::vector<Token> coords;
    std::vector<Token> leaf;
    bool have_coords = false;
    while (!accept("}")) {
      const Token key = expect_ident();
      expect("=");
      if (key.text == "coords") {
        coords = name_list();
        have_coords = true;
      } else if (key.text == "leaf") {
        leaf = name_list();
      } else {
        throw InputError("unknown chart field \"" + key.text + "\"", key.line);
      }
    }
    if (!have_coords || coords.empty()) throw InputError("the chart needs coords", line);
    std::set<std::string> declared;
    for (const auto& t : coords) {
      if (!declared.insert(t.text).second) throw InputError("duplicate coordinate \"" + t.text + "\"", t.line);
      if (t.text == "sin" || t.text == "cos" || t.text == "exp") {
        throw InputError("\"" + t.text + "\" cannot be a coordinate", t.line);
      }
    }
    std::set<std::string> seen;
    for (const auto& t : leaf) {
      if (!declared.contains(t.text)) throw InputError("undeclared coordinate \"" + t.text + "\"", t.line);
      if (!seen.insert(t.text).second) throw InputError("duplicate leaf coordinate \"" + t.text + "\"", t.line);
    }
    try {
      return Chart(texts(coords), texts(leaf));
    } catch (const Error& e) {
      throw InputError(e.what(), line);
    }
  }

  void samples(expr::SampleConfig& cfg) {
    expect("{");
    while (!accept("}")) {
      const Token key = expect_ident();
      expect("=");
      const Token v = next();
      if (v.type != Token::Type::Number) throw InputError("expected a number for \"" + key.text + "\"", v.line);
      try {
        if (key.text == "count" || key.text == "denom") {
          const int x = std::stoi(v.text);
          if (x <= 0 || std::to_string(x) != v.text) throw InputError("expected a positive integer", v.line);
          (key.text == "count" ? cfg.count : cfg.denom) = x;
        } else if (key.text == "seed") {
          if (v.text.find_first_not_of("0123456789") != std::string::npos) {
            throw InputError("expected a non-negative integer seed", v.line);
          }
          cfg.seed = std::stoull(v.text);
        } else if (key.text == "box") {
          const auto b = parse_rational(v.text);
          if (!b || *b <= 0) throw InputError("expected a positive rational box", v.line);
          cfg.box = *b;
        } else if (key.text == "tol") {
          std::size_t used = 0;
          const double t = std::stod(v.text, &used);
          if (used != v.text.size() || !(t > 0)) throw InputError("expected a positive tolerance", v.line);
          cfg.tol = t;
        } else {
          throw InputError("unknown samples field \"" + key.text + "\"", key.line);
        }
      } catch (const std::logic_error&) {
        throw InputError("malformed number \"" + v.text + "\"", v.line);
      }
    }
  }

  // name[i, j] = "expr" after the name has been read.
  std::pair<std::pair<int, int>, Expr> indexed_entry(const Chart& c, const Token& name) {
    const std::vector<Token> idx = name_list();
    if (idx.size() != 2) throw InputError("\"" + name.text + "\" takes two indices", name.line);
    expect("=");
    const Token value = expect_string();
    return {{index_in(c, idx[0]), index_in(c, idx[1])}, parse_expr(c, value)};
  }

  Structure structure(const Chart& c) {
    Structure s;
    s.name = expect_string().text;
    expect("{");
    const Token kind_key = expect_ident();
    if (kind_key.text != "kind") throw InputError("a structure starts with \"kind = ...\"", kind_key.line);
    expect("=");
    const Token kind = expect_ident();
    static const std::map<std::string, Kind> kinds{{"frame", Kind::Frame},
                                                   {"poisson", Kind::Poisson},
                                                   {"presymplectic", Kind::Presymplectic},
                                                   {"geometric_data", Kind::GeometricData}};
    const auto it = kinds.find(kind.text);
    if (it == kinds.end()) throw InputError("unknown structure kind \"" + kind.text + "\"", kind.line);
    s.kind = it->second;

    std::vector<Section> sections;
    Multivector bivector(c, 2);
    Form two_form(c, 2);
    Multivector pi(c, 2);
    std::map<std::pair<int, int>, Expr> a;
    std::set<std::pair<std::string, std::pair<int, int>>> seen;
    const auto allowed = [&](const std::string& field) {
      switch (s.kind) {
        case Kind::Frame:
          return field == "section";
        case Kind::Poisson:
          return field == "P";
        case Kind::Presymplectic:
          return field == "tau";
        case Kind::GeometricData:
          return field == "A" || field == "sigma" || field == "pi";
      }
      return false;
    };
    while (!accept("}")) {
      const Token field = expect_ident();
      if (field.text == "function") {
        expect("=");
        if (s.function) throw InputError("duplicate function", field.line);
        s.function = parse_expr(c, expect_string());
        continue;
      }
      if (!allowed(field.text)) {
        throw InputError("field \"" + field.text + "\" does not belong to kind " + kind.text, field.line);
      }
      if (field.text == "section") {
        expect("=");
        sections.push_back(section(c, field.line));
        continue;
      }
      auto [ij, value] = indexed_entry(c, field);
      auto [i, j] = ij;
      const std::string& f = field.text;
      if (f == "A") {
        if (!c.is_leaf(i) || c.is_leaf(j)) {
          throw InputError("A[a, u] needs a leaf index a and a transverse index u", field.line);
        }
      } else {
        if (i == j) throw InputError("diagonal component of an antisymmetric tensor", field.line);
        if (f == "sigma" && (c.is_leaf(i) || c.is_leaf(j))) {
          throw InputError("sigma takes transverse indices", field.line);
        }
        if (f == "pi" && (!c.is_leaf(i) || !c.is_leaf(j))) throw InputError("pi takes leaf indices", field.line);
      }
      const auto key = f == "A" ? ij : std::pair{std::min(i, j), std::max(i, j)};
      if (!seen.insert({f, key}).second) throw InputError("duplicate component of " + f, field.line);
      if (f == "A") {
        a[ij] = value;
      } else if (f == "P") {
        bivector = bivector + Multivector::basis(c, {i, j}) * value;
      } else if (f == "tau" || f == "sigma") {
        two_form = two_form + Form::basis(c, {i, j}) * value;
      } else {
        pi = pi + Multivector::basis(c, {i, j}) * value;
      }
    }
    try {
      switch (s.kind) {
        case Kind::Frame:
          if (sections.empty()) throw InputError("a frame needs sections", kind.line);
          s.frame = courant::frame_of(c, sections);
          break;
        case Kind::Poisson:
          s.frame = courant::graph_of_poisson(bivector);
          break;
        case Kind::Presymplectic:
          s.frame = courant::graph_of_presymplectic(two_form);
          break;
        case Kind::GeometricData:
          s.data = coupling::make_geometric_data(cartan::FrameSplit(c, a), two_form, pi);
          s.frame = coupling::reconstruct(*s.data);
          break;
      }
    } catch (const InputError&) {
      throw;
    } catch (const Error& e) {
      throw InputError(e.what(), kind.line);
    }
    return s;
  }

  // ("X1", ..., "Xn" | "a1", ..., "an")
  Section section(const Chart& c, int line) {
    expect("(");
    std::vector<Expr> x;
    std::vector<Expr> f;
    std::vector<Expr>* cur = &x;
    while (true) {
      cur->push_back(parse_expr(c, expect_string()));
      if (accept(",")) continue;
      if (cur == &x && accept("|")) {
        cur = &f;
        continue;
      }
      expect(")");
      break;
    }
    const auto n = static_cast<std::size_t>(c.n());
    if (x.size() != n || f.size() != n) {
      throw InputError("a section needs " + std::to_string(n) + " vector and " + std::to_string(n) +
                           " form components",
                       line);
    }
    return {Multivector::from_components(c, x), Form::from_components(c, f)};
  }

  NamedSubmanifold submanifold_block(const Chart& c) {
    NamedSubmanifold n;
    n.name = expect_string().text;
    const int line = peek().line;
    expect("{");
    bool have_zero = false;
    while (!accept("}")) {
      const Token key = expect_ident();
      if (key.text != "zero") throw InputError("unknown submanifold field \"" + key.text + "\"", key.line);
      expect("=");
      std::set<std::string> seen;
      for (const auto& t : name_list()) {
        index_in(c, t);
        if (!seen.insert(t.text).second) throw InputError("duplicate coordinate \"" + t.text + "\"", t.line);
        n.zero.push_back(t.text);
      }
      have_zero = true;
    }
    if (!have_zero || n.zero.empty()) throw InputError("the submanifold needs zero = [...]", line);
    if (n.zero.size() >= static_cast<std::size_t>(c.n())) throw InputError("the submanifold has no tangent coordinates", line);
    return n;
  }

  submanifold::Metric metric(const Chart& c) {
    const int line = peek().line;
    expect("{");
    const auto n = static_cast<std::size_t>(c.n());
    linalg::EMatrix g(n, std::vector<Expr>(n));
    bool euclidean = false;
    bool entries = false;
    std::set<std::pair<int, int>> seen;
    while (!accept("}")) {
      const Token key = expect_ident();
      if (key.text == "kind") {
        expect("=");
        const Token v = expect_ident();
        if (v.text != "euclidean") throw InputError("unknown metric kind \"" + v.text + "\"", v.line);
        euclidean = true;
      } else if (key.text == "g") {
        auto [ij, value] = indexed_entry(c, key);
        auto [i, j] = ij;
        if (!seen.insert({std::min(i, j), std::max(i, j)}).second) throw InputError("duplicate metric entry", key.line);
        g[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = value;
        g[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = value;
        entries = true;
      } else {
        throw InputError("unknown metric field \"" + key.text + "\"", key.line);
      }
    }
    if (euclidean == entries) throw InputError("a metric is either kind = euclidean or a list of g[i, j]", line);
    if (euclidean) return submanifold::Metric::euclidean(c);
    try {
      return {c, g};
    } catch (const Error& e) {
      throw InputError(e.what(), line);
    }
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

}  // namespace

Document parse_document(const std::string& text) { return Parser(tokenize(text)).document(); }

Document read_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read \"" + path + "\"", 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_document(ss.str());
}

std::string structure_block(const std::string& name, const coupling::GeometricData& data) {
  const Chart& c = data.split.chart();
  std::ostringstream out;
  out << "structure \"" << name << "\" {\n  kind = geometric_data\n";
  for (const auto& [au, v] : data.split.a_table()) {
    if (!v.is_zero()) out << "  A[" << c.name(au.first) << ", " << c.name(au.second) << "] = \"" << v.str() << "\"\n";
  }
  for (const auto& [m, v] : data.sigma.components()) {
    const auto idx = cartan::mask_indices(m);
    out << "  sigma[" << c.name(idx[0]) << ", " << c.name(idx[1]) << "] = \"" << v.str() << "\"\n";
  }
  for (const auto& [m, v] : data.pi.components()) {
    const auto idx = cartan::mask_indices(m);
    out << "  pi[" << c.name(idx[0]) << ", " << c.name(idx[1]) << "] = \"" << v.str() << "\"\n";
  }
  out << "}\n";
  return out.str();
}

}  // namespace dirac::cli
