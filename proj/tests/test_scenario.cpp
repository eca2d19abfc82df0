#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "nucheck/error.hpp"
#include "nucheck/scenario.hpp"

using namespace nucheck;

namespace {

const char* kMinimal = R"(
[scenario]
id = minimal

[weights]
nu = standard:1
mu = standard:1

[functions]
g = poly:[0,0;1,0]
phi = poly:[0,0;1,0]

[parameters]
alpha = 2

[tasks]
list = m1
)";

std::string with_line(const std::string& text, const std::string& from, const std::string& to) {
  std::string s = text;
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  return s;
}

int line_of(const std::function<void()>& f, std::string* field = nullptr) {
  try {
    f();
  } catch (const ParseError& e) {
    if (field) *field = e.field();
    return e.line();
  }
  FAIL("expected a ParseError");
  return -1;
}

RunOptions no_files() {
  RunOptions o;
  o.write_files = false;
  return o;
}

}  // namespace

TEST_CASE("minimal scenario parses") {
  const auto c = parse_scenario(kMinimal);
  CHECK(c.id == "minimal");
  CHECK(c.nu == "standard:1");
  CHECK(c.alpha == 2.0);
  CHECK(c.tasks == std::vector<std::string>{"m1"});
  CHECK(c.op == OperatorKind::T);
}

TEST_CASE("serialization round trip") {
  const auto c = parse_scenario(kMinimal);
  const auto again = parse_scenario(serialize_scenario(c));
  CHECK(again == c);
  CHECK(serialize_scenario(again) == serialize_scenario(c));
  const std::string rich = std::string(kMinimal) +
                           "\n[resolution]\nk_max = 10\nn_theta = 32\n[output]\ncsv = a/b.csv\n";
  std::string text = with_line(rich, "list = m1", "list = m1, nuclear, as_probe, p_alpha");
  text = with_line(text, "alpha = 2", "alpha = 2.5\nbeta = 1\ngamma = 0.75\noperator = S");
  CHECK_THROWS_AS(parse_scenario(text), ParseError);  // as_probe needs a family
  text = with_line(text, "[parameters]", "family = poly:[1,0] |  (add z (mul z z))\n\n[parameters]");
  const auto r = parse_scenario(text);
  CHECK(r.family == std::vector<std::string>{"poly:[1,0]", "(add z (mul z z))"});
  CHECK(r.op == OperatorKind::S);
  CHECK(r.resolution.at("k_max") == 10);
  CHECK(parse_scenario(serialize_scenario(r)) == r);
}

TEST_CASE("parse errors carry line and field") {
  std::string field;
  CHECK(line_of([&] { parse_scenario(with_line(kMinimal, "nu = standard:1", "nu = standard:-1")); }, &field) == 6);
  CHECK(field == "nu");
  CHECK(line_of([&] { parse_scenario(with_line(kMinimal, "nu = standard:1", "nu = gauss:1")); }) == 6);
  const std::string no_phi = with_line(with_line(kMinimal, "phi = poly:[0,0;1,0]\n", ""), "list = m1", "list = m_alpha");
  line_of([&] { parse_scenario(no_phi); }, &field);
  CHECK(field == "phi");
  CHECK(line_of([&] { parse_scenario(with_line(kMinimal, "list = m1", "list = m1, fly")); }) == 17);
  CHECK(line_of([&] { parse_scenario(with_line(kMinimal, "alpha = 2", "alpha = 2\ndelta = 1")); }) == 15);
  CHECK(line_of([&] { parse_scenario(with_line(kMinimal, "g = poly:[0,0;1,0]", "g = (add z")); }) == 10);
  line_of([&] { parse_scenario(with_line(kMinimal, "phi = poly:[0,0;1,0]", "phi = poly:[0,0;2,0]")); }, &field);
  CHECK(field == "phi");
  line_of([&] { parse_scenario(with_line(kMinimal, "list = m1", "list = p_alpha")); }, &field);
  CHECK(field == "beta");
  line_of([&] { parse_scenario(with_line(kMinimal, "nu = standard:1", "nu = table:/nonexistent/table.txt")); }, &field);
  CHECK(field == "nu");
  CHECK_THROWS_AS(parse_scenario(with_line(kMinimal, "list = m1", "list =  ")), ParseError);
  CHECK_THROWS_AS(parse_scenario(std::string(kMinimal) + "[resolution]\nk_max = 3\n"), ParseError);
}

TEST_CASE("m1 scenario report") {
  const auto out = run_scenario(parse_scenario(kMinimal), no_files());
  CHECK(out.exit_code == 0);
  CHECK(out.csv.rfind("scenario_id,task,kind,alpha,beta,gamma,rho,value,verdict,extrapolated,argmax_re,argmax_im,note\n", 0) == 0);
  CHECK(out.csv.find("minimal,m1,sup,2,,,,1,Bounded,") != std::string::npos);
  CHECK(out.report.at("schema_version") == 1);
  CHECK(report::to_csv(report::Json::parse(out.report.dump())) == out.csv);
  const std::string md = report::to_markdown(out.report);
  CHECK(md.rfind("# Scenario minimal\n", 0) == 0);
  CHECK(md.find("| minimal | m1 | sup |") != std::string::npos);
}

TEST_CASE("refused decomposition is recorded and deterministic") {
  const std::string text = with_line(with_line(with_line(kMinimal, "nu = standard:1", "nu = standard:3"),
                                               "phi = poly:[0,0;1,0]", "phi = poly:[0,0]"),
                                     "list = m1", "list = m_alpha, nuclear\n[resolution]\nn_theta = 16\ninner_radial = 16\ninner_angular = 32");
  const auto c = parse_scenario(with_line(text, "alpha = 2", "alpha = 1"));
  const auto a = run_scenario(c, no_files());
  const auto b = run_scenario(c, no_files());
  CHECK(a.exit_code == 0);
  CHECK(a.csv == b.csv);
  const auto& results = a.report.at("results");
  REQUIRE(results.size() == 2);
  CHECK(results[0].at("report").at("verdict").at("kind") == "Diverging");
  CHECK(results[1].at("type") == "refusal");
  CHECK(a.csv.find("Refused") != std::string::npos);
}

TEST_CASE("numerical errors stop the run with exit code 3") {
  // A table weight ending at r = 0.99 cannot be evaluated where the sup solver probes.
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nucheck_table_test";
  fs::create_directories(dir);
  {
    std::ofstream t(dir / "short.txt");
    for (int i = 0; i <= 99; ++i) t << i / 100.0 << ' ' << 1.0 - (i / 100.0) * (i / 100.0) << '\n';
  }
  const std::string text = with_line(kMinimal, "nu = standard:1", "nu = table:short.txt");
  const auto c = parse_scenario(with_line(text, "list = m1", "list = normality, m1"), dir.string());
  const auto out = run_scenario(c, no_files());
  CHECK(out.exit_code == 3);
  const auto& results = out.report.at("results");
  REQUIRE(results.size() == 1);
  CHECK(results[0].at("type") == "error");
  CHECK(results[0].at("task") == "normality");
  CHECK(results[0].at("error_class") == "ResolutionError");
  CHECK(out.report.at("status") == "error");
  CHECK(out.csv.find(",Error,") != std::string::npos);
  const auto m1 = run_scenario(parse_scenario(text, dir.string()), no_files());
  INFO(m1.csv);
  CHECK(m1.exit_code == 3);
  fs::remove_all(dir);
}

TEST_CASE("output files") {
  namespace fs = std::filesystem;
  const fs::path dir = fs::temp_directory_path() / "nucheck_scenario_test";
  fs::remove_all(dir);
  RunOptions o;
  o.out_dir = dir.string();
  const auto out = run_scenario(parse_scenario(std::string(kMinimal) + "[output]\ncsv = sub/x.csv\n"), o);
  CHECK(fs::exists(dir / "sub" / "x.csv"));
  CHECK(fs::exists(dir / "minimal.json"));
  std::ifstream in(dir / "sub" / "x.csv");
  std::string first;
  std::getline(in, first);
  CHECK(first.rfind("scenario_id,", 0) == 0);
  fs::remove_all(dir);
}

TEST_CASE("report rejects foreign documents") {
  CHECK_THROWS_AS(report::to_csv(report::Json::object()), ParseError);
  report::Json doc{{"schema_version", 2}, {"scenario", report::Json::object()}, {"results", report::Json::array()}};
  CHECK_THROWS_AS(report::to_csv(doc), ParseError);
}
