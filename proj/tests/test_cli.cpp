#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "liouville/cli/report.hpp"
#include "liouville/errors.hpp"

using namespace liouville;
using namespace liouville::cli;

namespace {

const char* kSmall = R"json({
  "fields": {
    "rot": { "manifold": "cigar", "builtin": "rotation" }
  },
  "maps": {
    "wave": { "domain": "torus_flat:2", "target": "cigar", "random_polynomial": { "degree": 2, "seed": 9 } },
    "escape": { "domain": "euclidean:2", "target": "hyperbolic_halfplane", "components": ["x0", "x1"] }
  },
  "tasks": [
    { "id": "soliton", "kind": "check-soliton", "manifold": "cigar", "potential": "-log(1+x0^2+x1^2)", "lambda": 0 },
    { "id": "pinch", "kind": "ricci-pinch", "manifold": "cigar", "lambda": 0 },
    { "id": "jacobi", "kind": "check-jacobi", "field": "rot", "seed": 3 },
    { "id": "conformal", "kind": "check-identity:conformal", "map": "wave", "field": "rot",
      "samples": { "lattice": 0, "random": 20, "seed": 4 } },
    { "id": "torus", "kind": "flow", "target": "torus_flat:2", "resolution": [8, 8], "initializer": "identity" },
    { "id": "escape", "kind": "tension", "map": "escape" },
    { "id": "escape-expected", "kind": "tension", "map": "escape", "expect_error": "ChartExit" }
  ]
})json";

Manifest small() { return parse_manifest_text(kSmall); }

const Report& find(const std::vector<Report>& rs, const std::string& id) {
  for (const auto& r : rs) {
    if (r.id == id) return r;
  }
  FAIL("missing report " << id);
  return rs.front();
}

}  // namespace

TEST_CASE("parse_manifest accepts catalog-only manifests") {
  const auto m = parse_manifest_text(R"json({"tasks": [{"id": "p", "kind": "ricci-pinch", "manifold": "hyperbolic_halfplane",
                                        "lambda": 0, "side": "below"}]})json");
  CHECK(m.manifolds.empty());
  REQUIRE(m.tasks.size() == 1);
  CHECK(m.tasks[0].kind == TaskKind::RicciPinch);
  CHECK(parse_manifest_text("{}").tasks.empty());
}

TEST_CASE("parse_manifest rejects dangling references") {
  try {
    parse_manifest_text(R"json({"fields": {"xi": {"manifold": "m1", "components": ["1", "0"]}}})json");
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(e.offending_name() == "m1");
    CHECK(std::string(e.what()).find("m1") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_manifest_text(R"json({"tasks": [{"id": "t", "kind": "tension", "map": "nope"}]})json"),
                  ValidationError);
  CHECK_THROWS_AS(parse_manifest_text(R"json({"tasks": [{"id": "t", "kind": "teleport"}]})json"), ValidationError);
  CHECK_THROWS_AS(parse_manifest_text(R"json({"tasks": [{"id": "t", "kind": "ricci-pinch", "manifold": "cigar"}]})json"),
                  ValidationError);
  CHECK_THROWS_AS(parse_manifest_text(R"json({"manifolds": {"m": {"dim": 2, "metric": [["1", "x0"], ["0", "1"]]}}})json"),
                  ValidationError);
  CHECK_THROWS_AS(parse_manifest_text(R"json({"tasks": [{"id": "a", "kind": "ricci-pinch", "manifold": "cigar", "lambda": 0},
                                                    {"id": "a", "kind": "ricci-pinch", "manifold": "cigar", "lambda": 0}]})json"),
                  ValidationError);
}

TEST_CASE("parse_manifest reports positions") {
  const std::string text = "{\n  \"manifolds\": {\n    \"m\": {\"dim\": 1, \"metric\": [[\"x0 +\"]]}\n  }\n}";
  try {
    parse_manifest_text(text);
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    // opening quote at column 33, end of expression at its column 5
    CHECK(e.column() == 38);
    CHECK(std::string(e.what()).find("manifolds.m.metric[0][0]") != std::string::npos);
  }
  try {
    parse_manifest_text("{\n  \"tasks\": [\n    {\"id\": 1,,}\n  ]\n}");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 3);
    CHECK(e.column() == 14);
  }
}

TEST_CASE("user manifolds and maps") {
  const auto m = parse_manifest_text(R"json({
    "manifolds": {"h": {"dim": 2, "metric": [["1/x1^2", 0], [0, "1/x1^2"]], "sample_box": [[-1, 1], [0.5, 2]],
                        "chart_region": [[null, null], [0, null]]}},
    "maps": {"m": {"domain": "euclidean:2", "target": "h", "components": ["x0", "1"]}},
    "tasks": [{"id": "pinch", "kind": "ricci-pinch", "manifold": "h", "lambda": -0.5, "side": "below"}]
  })json");
  const auto reports = run_manifest(m);
  CHECK(reports[0].pass);
  CHECK(reports[0].result["max_eigenvalue"].get<double>() == doctest::Approx(-1.0));
  CHECK(m.manifold("h").in_chart(Eigen::Vector2d(0, 1)));
  CHECK_FALSE(m.manifold("h").in_chart(Eigen::Vector2d(0, -1)));
}

TEST_CASE("run_task outcomes") {
  const auto reports = run_manifest(small());
  REQUIRE(reports.size() == 7);
  CHECK(find(reports, "soliton").pass);
  CHECK(find(reports, "pinch").pass);
  CHECK(find(reports, "jacobi").pass);
  CHECK(find(reports, "conformal").pass);
  const auto& torus = find(reports, "torus");
  CHECK(torus.pass);
  CHECK(torus.result["verdict"] == "converged-nonconstant");
  const auto& escape = find(reports, "escape");
  CHECK_FALSE(escape.pass);
  CHECK(escape.error_kind == "ChartExit");
  CHECK(find(reports, "escape-expected").pass);
  CHECK(failures(reports) == 1);
  CHECK_THROWS_AS(run_manifest(small(), {}, std::string("missing")), ValidationError);
  CHECK(run_manifest(small(), {}, std::string("pinch")).size() == 1);
}

TEST_CASE("overrides") {
  const auto m = small();
  RunOptions strict;
  strict.tolerance = 1e-30;
  CHECK_FALSE(run_manifest(m, strict, std::string("soliton"))[0].pass);
  RunOptions seeded;
  seeded.seed = 99;
  const auto a = run_manifest(m, seeded, std::string("conformal"))[0];
  const auto b = run_manifest(m, {}, std::string("conformal"))[0];
  CHECK(a.identities[0].rows[0].point != b.identities[0].rows[0].point);
}

TEST_CASE("report serialization") {
  const auto reports = run_manifest(small());
  const auto first = to_json(reports).dump();
  CHECK(first == to_json(run_manifest(small())).dump());
  CHECK(first.find("wall") == std::string::npos);

  const auto& soliton = find(reports, "soliton");
  REQUIRE(soliton.field_report);
  const auto j = to_json(*soliton.field_report);
  const auto back = field_report_from_json(nlohmann::ordered_json::parse(j.dump()));
  CHECK(back.residuals == soliton.field_report->residuals);
  CHECK(back.sup == soliton.field_report->sup);
  CHECK(back.check == soliton.field_report->check);
  CHECK(to_json(back) == j);
  CHECK_THROWS_AS(field_report_from_json(nlohmann::ordered_json::object()), ValidationError);

  std::ostringstream text;
  write_text(text, reports);
  CHECK(text.str().find("soliton") != std::string::npos);
  CHECK(text.str().find("7 tasks, 1 failed") != std::string::npos);

  std::ostringstream csv;
  write_csv(csv, find(reports, "torus"));
  CHECK(csv.str().rfind("step,t,energy,sup_tension,sup_dphi\n", 0) == 0);
  std::ostringstream rows;
  write_csv(rows, find(reports, "conformal"));
  CHECK(rows.str().rfind("identity,sample,point,component,left,right,residual\n", 0) == 0);
  std::ostringstream kv;
  write_csv(kv, find(reports, "pinch"));
  CHECK(kv.str().rfind("key,value\nholds,true\n", 0) == 0);

  const auto dir = std::filesystem::temp_directory_path() / "liouville_cli_test";
  std::filesystem::remove_all(dir);
  emit_reports(reports, Format::Csv, dir);
  CHECK(std::filesystem::exists(dir / "torus.csv"));
  emit_reports(reports, Format::Json, dir);
  std::ifstream in(dir / "report.json");
  std::stringstream buf;
  buf << in.rdbuf();
  CHECK(nlohmann::ordered_json::parse(buf.str()) == to_json(reports));
  CHECK_THROWS_AS(emit_report(reports[0], Format::Json, dir / "missing" / "x.json"), IoError);
  std::filesystem::remove_all(dir);
}
