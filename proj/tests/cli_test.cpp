#include <gtest/gtest.h>

#include <json.hpp>

#include <fstream>
#include <sstream>

#include "app.hpp"
#include "input.hpp"
#include "support/catalog.hpp"

using namespace dirac;
using namespace dirac::cli;
using namespace dirac::testing;
using expr::Scalar;
using nlohmann::json;

namespace {

const std::string kFixtures = DIRAC_FIXTURES;

std::string fixture(const std::string& name) { return kFixtures + "/" + name + ".dirac"; }

std::string write_temp(const std::string& name, const std::string& text) {
  const std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run_cli(const std::string& command, const std::string& path, Options opts = {}) {
  std::ostringstream out;
  std::ostringstream err;
  const int code = run(command, path, opts, out, err);
  return {code, out.str(), err.str()};
}

const json* table(const json& report, const std::string& name) {
  for (const auto& t : report["tables"]) {
    if (t["name"] == name) return &t["entries"];
  }
  return nullptr;
}

int input_error_line(const std::string& text) {
  try {
    parse_document(text);
  } catch (const InputError& e) {
    return e.line();
  }
  return -1;
}

const char* kHeader = "format = 1\nchart { coords = [x1, x2, y1, y2] leaf = [y1, y2] }\n";

}  // namespace

TEST(InputFormat, ParsesEveryBlock) {
  const Document doc = parse_document(std::string(kHeader) + R"(
structure "P" {
  kind = poisson
  P[y2, y1] = "y1"     # reversed order flips the sign
  function = "x1*y2"
}
submanifold "N" { zero = [y1] }
metric { g[x1, x1] = "1"  g[x2, x2] = "1"  g[y1, y1] = "1"  g[y2, y2] = "1"  g[x1, y1] = "1/2" }
samples { count = 5 seed = 7 box = 1/2 denom = 64 tol = 1e-6 }
)");
  EXPECT_EQ(doc.chart.n(), 4);
  EXPECT_EQ(doc.chart.p(), 2);
  ASSERT_EQ(doc.structures.size(), 1U);
  const Structure& s = doc.structures[0];
  EXPECT_EQ(s.kind, Kind::Poisson);
  ASSERT_TRUE(s.frame.bivector.has_value());
  EXPECT_TRUE(s.frame.bivector->get({2, 3}).equals(doc.chart.parse("-y1")));
  ASSERT_TRUE(s.function.has_value());
  ASSERT_TRUE(doc.submanifold.has_value());
  EXPECT_EQ(doc.submanifold->zero, std::vector<std::string>{"y1"});
  ASSERT_TRUE(doc.metric.has_value());
  EXPECT_TRUE(doc.metric->g()[2][0].equals(Expr(Scalar(1, 2))));
  EXPECT_EQ(doc.samples.count, 5);
  EXPECT_EQ(doc.samples.seed, 7U);
  EXPECT_EQ(doc.samples.box, Scalar(1, 2));
  EXPECT_EQ(doc.samples.denom, 64);
  EXPECT_DOUBLE_EQ(doc.samples.tol, 1e-6);
}

TEST(InputFormat, KindsBuildTheExpectedFrames) {
  const Document frame = read_document(fixture("frame"));
  const Chart plane({"x", "y"}, {"y"});
  const DiracFrame expected = courant::graph_of_presymplectic(two_form(plane, {{0, 1, "1"}}));
  for (std::size_t i = 0; i < 2; ++i) {
    EXPECT_TRUE(frame.structures[0].frame.sections[i].equals(expected.sections[i])) << i;
  }

  const Document data = read_document(fixture("curved_data"));
  ASSERT_TRUE(data.structures[0].data.has_value());
  const GeometricData want = curved_data();
  EXPECT_TRUE(data.structures[0].data->sigma.equals(want.sigma));
  EXPECT_TRUE(data.structures[0].data->pi.equals(want.pi));
  EXPECT_TRUE(data.structures[0].data->split.a(2, 1).equals(want.split.a(2, 1)));
}

TEST(InputFormat, RejectsMalformedInput) {
  const std::string h = kHeader;
  const std::vector<std::pair<std::string, int>> cases{
      {"format = 1\nchart { coords = [x1, x2] leaf = [z9] }\nstructure \"L\" { kind = frame }", 2},
      {"format = 2\n", 1},
      {"structure \"L\" { kind = poisson }\n", 1},
      {"format = 1\nchart { coords = [x1, x1] }\n", 2},
      {h + "structure \"L\" {\n  kind = poisson\n  P[x1, x2] = \"x1 +\"\n}", 5},
      {h + "structure \"L\" {\n  kind = poisson\n  P[x1, q] = \"1\"\n}", 5},
      {h + "structure \"L\" {\n  kind = poisson\n  P[x1, x2] = \"1\"\n  P[x2, x1] = \"2\"\n}", 6},
      {h + "structure \"L\" {\n  kind = poisson\n  P[x1, x1] = \"1\"\n}", 5},
      {h + "structure \"L\" {\n  kind = poisson\n  tau[x1, x2] = \"1\"\n}", 5},
      {h + "structure \"L\" {\n  kind = geometric_data\n  sigma[x1, y1] = \"1\"\n}", 5},
      {h + "structure \"L\" {\n  kind = geometric_data\n  pi[x1, y1] = \"1\"\n}", 5},
      {h + "structure \"L\" {\n  kind = geometric_data\n  A[x1, y1] = \"1\"\n}", 5},
      {h + "structure \"L\" {\n  kind = frame\n  section = (\"1\", \"0\" | \"0\", \"1\")\n}", 5},
      {h + "structure \"L\" {\n  kind = spinor\n}", 4},
      {h + "structure \"L\" { kind = poisson }\nmetric { g[x1, x1] = \"1\" }", 4},
      {h + "structure \"L\" { kind = poisson }\nsubmanifold \"N\" { zero = [x1, x2, y1, y2] }", 4},
      {h + "structure \"L\" { kind = poisson }\nsamples { count = 0 }", 4},
      {h + "structure \"L\" { kind = poisson }\nsamples { box = -1 }", 4},
      {h + "structure \"L\" {\n  kind = poisson\n  P[x1, x2] = \"1\n}", 5},
      {h + "structure \"L\" { kind = poisson }\nstructure \"L\" { kind = poisson }", 4},
      {h + "chart { coords = [x1] }\n", 3},
  };
  for (const auto& [text, line] : cases) EXPECT_EQ(input_error_line(text), line) << text;
  EXPECT_THROW(parse_document(h), InputError);  // no structure
  EXPECT_THROW(read_document("/nonexistent/file.dirac"), InputError);
}

TEST(InputFormat, EmittedBlockParsesBack) {
  const GeometricData data = curved_data();
  const std::string text = std::string(kHeader) + structure_block("curved", data);
  const Document doc = parse_document(text);
  const auto& back = doc.structures[0].data;
  ASSERT_TRUE(back.has_value());
  EXPECT_TRUE(back->sigma.equals(data.sigma));
  EXPECT_TRUE(back->pi.equals(data.pi));
  EXPECT_TRUE(back->split.a(2, 1).equals(data.split.a(2, 1)));
}

TEST(Cli, SymplecticVerifyPasses) {
  const CliRun r = run_cli("verify", fixture("symplectic"));
  EXPECT_EQ(r.code, 0) << r.err;
  const json j = json::parse(r.out);
  EXPECT_EQ(j["status"], "pass");
  EXPECT_EQ(j["format"], 1);
  for (const auto& c : j["checks"]) EXPECT_EQ(c["status"], "pass") << c["id"];
  for (const std::string id : {"closure", "leaf-parity", "jacobi-anomaly", "leibniz"}) {
    bool found = false;
    for (const auto& c : j["checks"]) found = found || c["id"] == id;
    EXPECT_TRUE(found) << id;
  }
}

TEST(Cli, UndeclaredCoordinateExitsWithValidationError) {
  const CliRun r = run_cli("verify", fixture("undeclared"));
  EXPECT_EQ(r.code, 3);
  EXPECT_TRUE(r.out.empty());
  EXPECT_NE(r.err.find("z9"), std::string::npos) << r.err;
}

TEST(Cli, CouplingReportsSigmaAndPiTables) {
  const CliRun r = run_cli("coupling", fixture("tau"));
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  const json* sigma = table(j, "sigma");
  const json* pi = table(j, "Pi");
  ASSERT_NE(sigma, nullptr);
  ASSERT_NE(pi, nullptr);
  // by hand: X1 = d_x1 + x1 d_y2 makes sigma = tau(X1, X2) = 1 + x1^2, Pi inverts dy1^dy2
  EXPECT_EQ((*sigma)["sigma(x1,x2)"], "x1^2 + 1");
  EXPECT_EQ((*pi)["Pi(y1,y2)"], "-1");
  const json* h = table(j, "H frame");
  ASSERT_NE(h, nullptr);
  EXPECT_EQ((*h)["A(y2,x1)"], "x1");

  // and against the library on the same form
  const Form tau = two_form(foliated_r4(), {{0, 1, "1 + x1^2"}, {0, 2, "x1"}, {2, 3, "1"}});
  const GeometricData data = coupling::extract_geometric_data(courant::graph_of_presymplectic(tau), {});
  EXPECT_EQ((*sigma)["sigma(x1,x2)"], data.sigma.get({0, 1}).str());
  EXPECT_EQ((*pi)["Pi(y1,y2)"], data.pi.get({2, 3}).str());
}

TEST(Cli, ReportIsDeterministic) {
  for (const std::string cmd : {"coupling", "verify", "linearize"}) {
    const std::string f = cmd == "linearize" ? "so3" : "tau";
    const CliRun a = run_cli(cmd, fixture(f));
    const CliRun b = run_cli(cmd, fixture(f));
    EXPECT_EQ(a.out, b.out) << cmd;
    EXPECT_EQ(a.code, b.code);
  }
  Options seeded;
  seeded.seed = 9;
  const CliRun seeded_a = run_cli("verify", fixture("unknown"), seeded);
  const CliRun seeded_b = run_cli("verify", fixture("unknown"), seeded);
  EXPECT_EQ(seeded_a.out, seeded_b.out);
}

TEST(Cli, ExitCodeAgreesWithWorstStatus) {
  const std::vector<std::string> files{"symplectic", "tau",       "block_poisson", "broken",       "so3",    "curved_data",
                                       "frame",      "unknown",   "plane_in_r3",   "cosymplectic"};
  std::set<int> seen;
  for (const auto& f : files) {
    for (const std::string cmd : {"verify", "coupling", "linearize", "submanifold", "axioms"}) {
      const CliRun r = run_cli(cmd, fixture(f));
      seen.insert(r.code);
      if (r.code == 3) {
        EXPECT_TRUE(cmd == "submanifold") << cmd << " " << f << ": " << r.err;
        continue;
      }
      const json j = json::parse(r.out);
      Status worst_status = Status::Pass;
      for (const auto& c : j["checks"]) {
        const std::string s = c["status"];
        const Status st = s == "pass" ? Status::Pass : s == "unknown" ? Status::Unknown : s == "fail" ? Status::Fail
                                                                                                      : Status::Invalid;
        worst_status = worst(worst_status, st);
        if (st == Status::Fail) EXPECT_FALSE(c["witnesses"].empty()) << cmd << " " << f << " " << c["id"];
      }
      EXPECT_EQ(j["status"], to_string(worst_status)) << cmd << " " << f;
      EXPECT_EQ(r.code, exit_code(worst_status)) << cmd << " " << f;
    }
  }
  EXPECT_EQ(seen, (std::set<int>{0, 1, 2, 3}));
}

TEST(Cli, UnknownOnlyExitsWithTwo) {
  const CliRun r = run_cli("verify", fixture("unknown"));
  EXPECT_EQ(r.code, 2);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["status"], "unknown");
}

TEST(Cli, FailingStructureExitsWithOneAndWitness) {
  const CliRun r = run_cli("verify", fixture("broken"));
  EXPECT_EQ(r.code, 1);
  const json j = json::parse(r.out);
  for (const auto& c : j["checks"]) {
    if (c["id"] == "closure") {
      EXPECT_EQ(c["status"], "fail");
      ASSERT_FALSE(c["witnesses"].empty());
    }
  }
}

TEST(Cli, ExactOnlyRejectsTranscendentalCoefficients) {
  Options opts;
  opts.exact_only = true;
  EXPECT_EQ(run_cli("verify", fixture("unknown"), opts).code, 3);
  EXPECT_EQ(run_cli("verify", fixture("symplectic"), opts).code, 0);
}

TEST(Cli, FlagsOverrideTheSamplesBlock) {
  Options opts;
  opts.samples = 5;
  opts.box = "1/2";
  opts.seed = 3;
  opts.tol = 1e-7;
  const CliRun r = run_cli("coupling", fixture("tau"), opts);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["samples"]["count"], 5);
  EXPECT_EQ(j["samples"]["box"], "1/2");
  EXPECT_EQ(j["samples"]["seed"], 3);
  EXPECT_EQ(j["samples"]["tol"], 1e-7);
  EXPECT_EQ((*table(j, "normal distribution")).size(), 5U);

  Options bad;
  bad.box = "wide";
  EXPECT_EQ(run_cli("verify", fixture("tau"), bad).code, 3);
  Options missing;
  missing.structure = "nope";
  EXPECT_EQ(run_cli("verify", fixture("tau"), missing).code, 3);
}

TEST(Cli, TextFormatRendersTheSameChecks) {
  Options text;
  text.format = Format::Text;
  const CliRun t = run_cli("coupling", fixture("tau"), text);
  const json j = json::parse(run_cli("coupling", fixture("tau")).out);
  EXPECT_EQ(t.code, 0);
  for (const auto& c : j["checks"]) {
    EXPECT_NE(t.out.find("[pass] " + c["id"].get<std::string>() + ":"), std::string::npos) << c["id"];
  }
  EXPECT_NE(t.out.find("sigma(x1,x2) = x1^2 + 1"), std::string::npos);
}

TEST(Cli, LinearizeEmitsAFixedPoint) {
  const CliRun r = run_cli("linearize", fixture("curved_data"));
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  const std::string block = j["emitted"];
  EXPECT_NE(block.find("structure \"curved_linear\""), std::string::npos);
  const std::string path = write_temp("linear.dirac", std::string(kHeader) + block);
  Options pick;
  pick.structure = "curved_linear";
  const CliRun again = run_cli("linearize", path, pick);
  ASSERT_EQ(again.code, 0) << again.out;
  const json k = json::parse(again.out);
  // y-linear input linearizes to itself
  EXPECT_EQ(k["emitted"].get<std::string>(),
            std::string(block).replace(block.find("curved_linear"), 13, "curved_linear_linear"));
}

TEST(Cli, LinearizeRejectsNonVanishingLeafData) {
  const CliRun r = run_cli("linearize", fixture("block_poisson"));
  EXPECT_EQ(r.code, 1);
  const json j = json::parse(r.out);
  EXPECT_EQ(j["checks"][0]["id"], "leaf-presentation");
  EXPECT_EQ(j["checks"][0]["status"], "invalid");
}

TEST(Cli, SubmanifoldReportsSecondFundamentalForm) {
  const CliRun plane = run_cli("submanifold", fixture("plane_in_r3"));
  EXPECT_EQ(plane.code, 1);
  const json j = json::parse(plane.out);
  const json* b = table(j, "second fundamental form");
  ASSERT_NE(b, nullptr);
  EXPECT_EQ((*b)["B(l1,l2)(d/dx3)"], "1");
  for (const auto& c : j["checks"]) {
    if (c["id"] == "totally-dirac" || c["id"] == "cosymplectic") {
      EXPECT_EQ(c["status"], "fail");
    } else {
      EXPECT_EQ(c["status"], "pass") << c["id"];
    }
  }

  const CliRun cos = run_cli("submanifold", fixture("cosymplectic"));
  EXPECT_EQ(cos.code, 0) << cos.out;
  EXPECT_EQ(run_cli("submanifold", fixture("tau")).code, 3);
}
