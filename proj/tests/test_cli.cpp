#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "generators.hpp"
#include "jetstress/verify.hpp"

using namespace jetstress;
using jetstress::testing::for_all;
using jetstress::testing::Gen;

namespace {

Json read_json(const std::string& path) {
  std::ifstream in(path);
  return Json::parse(in);
}

}  // namespace

TEST(Io, ExpressionRoundTripProperty) {
  for_all(71, 30, [](Gen& g) {
    const int n = g.integer(1, 3);
    Expr e = random_polynomial(n, 3, g.rng);
    if (g.integer(0, 1)) e = Expr::sin(e) + Expr::exp(Expr::variable(0)) - Expr::pow(Expr::variable(n - 1), 2);
    const Expr back = expr_from_json(to_json(e));
    const auto x = g.point(n);
    const std::span<const double> vars(x.data(), static_cast<std::size_t>(n));
    EXPECT_DOUBLE_EQ(back.evaluate(vars), e.evaluate(vars));
  });
}

TEST(Io, VariablesAreOneBased) {
  const Expr e = expr_from_json(Json::parse(R"({"var": 2})"));
  const std::vector<double> x{5.0, 7.0};
  EXPECT_EQ(e.evaluate(x), 7.0);
  EXPECT_THROW(expr_from_json(Json::parse(R"({"var": 0})")), ParseError);
}

TEST(Io, MalformedExpressionsAreParseErrors) {
  for (const char* bad : {R"({"op": "tan", "args": [1]})", R"({"op": "sub", "args": [1]})", R"("x")",
                          R"({"op": "pow", "args": [1]})"}) {
    EXPECT_THROW(expr_from_json(Json::parse(bad)), ParseError) << bad;
  }
}

TEST(Io, FieldComponentsLandInTheirSlots) {
  const auto spec = field_from_json(Json::parse(R"({
    "kind": "traction", "n": 2, "m": 1, "k": 2,
    "components": [{"alpha": 1, "index": [1, 0], "j": 2, "expr": 4}]})"));
  const auto tau = spec.traction().at(Eigen::VectorXd::Zero(2));
  EXPECT_EQ(tau(0, MultiIndex({1, 0}), 1), 4.0);
  EXPECT_EQ(tau.flatten().cwiseAbs().sum(), 4.0);
  EXPECT_EQ(component_key(FieldKind::traction, 2, 1, 2, 3), "a1:J[1,0]:j2");
}

TEST(Io, FieldShapeErrors) {
  EXPECT_THROW(field_from_json(Json::parse(R"({"kind": "traction", "n": 2, "m": 1, "k": 2,
    "components": [{"alpha": 1, "index": [2, 0], "j": 1, "expr": 1}]})")),
               ParseError);
  EXPECT_THROW(field_from_json(Json::parse(R"({"kind": "traction", "n": 2, "m": 1, "k": 2,
    "components": [{"alpha": 2, "index": [0, 0], "j": 1, "expr": 1}]})")),
               ParseError);
  EXPECT_THROW(field_from_json(Json::parse(R"({"kind": "stress", "n": 2, "m": 1, "k": 2, "components": []})")),
               ParseError);
}

TEST(Config, RejectsUnknownKeysAndRanges) {
  for (const char* bad : {R"({"bogus": 1})", R"({"n": 5})", R"({"k": [0]})", R"({"m": 4})", R"({"seed": -1})",
                          R"({"suites": ["nope"]})", R"({"fault_injection": "other"})", R"({"tolerances": {"x": 1}})",
                          R"([1, 2])"}) {
    EXPECT_THROW(config_from_json(Json::parse(bad)), ParseError) << bad;
  }
}

TEST(Config, ShippedConfigsParse) {
  for (const char* name : {"default.json", "quick.json", "plane_chart.json", "fault_collapse.json"}) {
    EXPECT_NO_THROW(config_from_json(read_json(std::string(JETSTRESS_CONFIG_DIR) + "/" + name))) << name;
  }
  const auto c = config_from_json(read_json(std::string(JETSTRESS_CONFIG_DIR) + "/plane_chart.json"));
  EXPECT_TRUE(c.chart.has_value());
  EXPECT_EQ(c.fields.size(), 3u);
  EXPECT_EQ(c.regions.size(), 2u);
}

TEST(Verify, ReportIsVersionedAndDeterministic) {
  VerifyConfig c;
  c.suites = {"dims", "arrows"};
  const auto a = run_verify(c).to_json(false), b = run_verify(c).to_json(false);
  EXPECT_EQ(a, b);
  EXPECT_EQ(a["report_version"], kReportVersion);
  EXPECT_TRUE(a["pass"].get<bool>());
  for (const auto& check : a["checks"]) {
    EXPECT_TRUE(check.contains("max_abs_residual"));
    EXPECT_TRUE(check.contains("tolerance"));
    EXPECT_TRUE(check.contains("identity"));
  }
}

TEST(Verify, FaultInjectionIsCaught) {
  VerifyConfig c;
  c.points = 5;
  c.systems = 2;
  c.suites = {"duality"};
  EXPECT_TRUE(run_verify(c).pass());
  c.fault_injection = "collapse_factor";
  EXPECT_FALSE(run_verify(c).pass());
}

TEST(Verify, SeedChangesTheSamples) {
  VerifyConfig c;
  c.points = 3;
  c.systems = 2;
  c.suites = {"duality"};
  const auto a = run_verify(c).to_json(false);
  c.seed += 1;
  const auto b = run_verify(c).to_json(false);
  EXPECT_NE(a["checks"], b["checks"]);
}

TEST(Verify, SymmetryExampleAndDims) {
  const auto ex = example_symmetry();
  EXPECT_NE(ex.table.find("tau^12"), std::string::npos);
  for (const auto& c : ex.checks) EXPECT_TRUE(c.pass) << format_check(c);
  const auto dims = dims_table(4, 4);
  EXPECT_TRUE(dims.checks.front().pass);
}

TEST(Verify, ExportWritesOneCsvPerField) {
  const auto c = config_from_json(read_json(std::string(JETSTRESS_CONFIG_DIR) + "/plane_chart.json"));
  const auto dir = std::filesystem::temp_directory_path() / "jetstress_export_test";
  std::filesystem::remove_all(dir);
  const auto manifest = export_samples(c, dir);
  EXPECT_EQ(manifest["report_version"], kReportVersion);
  for (const auto& f : manifest["files"]) EXPECT_TRUE(std::filesystem::exists(dir / f["path"].get<std::string>()));
  std::ifstream csv(dir / "field0_traction.csv");
  std::string header;
  std::getline(csv, header);
  EXPECT_EQ(header.substr(0, 6), "x1,x2,");
  int rows = 0;
  for (std::string line; std::getline(csv, line);) ++rows;
  EXPECT_EQ(rows, 16);
}
