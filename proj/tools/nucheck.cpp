// nucheck: scenario runner and report converter.
//
//   nucheck check-weights <file>
//   nucheck run <scenario> [--out-dir DIR] [--quiet]
//   nucheck report <json> --format csv|md [-o FILE]
//
// Exit codes: 0 success, 2 parse/configuration error, 3 numerical evaluation error.

#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "nucheck/error.hpp"
#include "nucheck/scenario.hpp"
#include "nucheck/text.hpp"
#include "nucheck/weights.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kEvaluationError = 3;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw nucheck::ParseError("cannot open '" + path + "'", 0, "file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string optional_number(const std::optional<double>& x) {
  return x ? nucheck::text::format_number(*x) : "-";
}

// A file whose first entry is two numbers is a weight table; otherwise every
// non-comment line is a weight spec.
int check_weights(const std::string& path) {
  const std::string contents = read_file(path);
  std::vector<std::string> specs;
  std::istringstream in(contents);
  std::string raw;
  while (std::getline(in, raw)) {
    const auto line = nucheck::text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    std::istringstream probe{std::string(line)};
    double a = 0.0, b = 0.0;
    if (specs.empty() && (probe >> a >> b)) {
      specs = {"table:" + path};
      break;
    }
    specs.emplace_back(line);
  }
  if (specs.empty()) throw nucheck::ParseError("no weight specs in '" + path + "'", 0, "file");
  std::cout << "spec,verdict,condition_i_inf,beta_estimate,gamma_estimate,condition_ii_k,certified\n";
  for (const auto& spec : specs) {
    const auto w = nucheck::RadialWeight::parse(spec);
    const auto r = nucheck::check_normality(w);
    std::cout << w.spec() << ',' << nucheck::to_string(r.verdict) << ','
              << nucheck::text::format_number(r.condition_i_inf) << ',' << optional_number(r.beta_estimate) << ','
              << optional_number(r.gamma_estimate) << ','
              << (r.condition_ii_k ? std::to_string(*r.condition_ii_k) : "-") << ','
              << (r.certified ? "true" : "false") << '\n';
  }
  return 0;
}

int run(const std::string& path, const std::string& out_dir, bool quiet) {
  const nucheck::ScenarioConfig config = nucheck::load_scenario(path);
  nucheck::RunOptions options;
  options.out_dir = out_dir;
  const auto outcome = nucheck::run_scenario(config, options);
  if (!quiet) std::cout << outcome.csv;
  std::cerr << "wrote " << outcome.csv_path << " and " << outcome.json_path << '\n';
  if (outcome.exit_code != 0) {
    const auto& last = outcome.report.at("results").back();
    std::cerr << "error in task " << last.value("task", "") << ": " << last.value("message", "") << '\n';
  }
  return outcome.exit_code;
}

int report(const std::string& path, const std::string& format, const std::string& output) {
  nucheck::report::Json doc;
  try {
    doc = nucheck::report::Json::parse(read_file(path));
  } catch (const nlohmann::json::parse_error& e) {
    throw nucheck::ParseError(std::string("invalid JSON: ") + e.what(), 0, "report");
  }
  const std::string text = format == "csv" ? nucheck::report::to_csv(doc) : nucheck::report::to_markdown(doc);
  if (output.empty()) {
    std::cout << text;
  } else {
    std::ofstream out(output, std::ios::binary);
    out << text;
    if (!out) throw nucheck::ParseError("cannot write '" + output + "'", 0, "output");
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks for weighted composition-Volterra operators"};
  app.require_subcommand(1);

  std::string weights_file;
  auto* check = app.add_subcommand("check-weights", "Classify the normality of weight specs or a weight table");
  check->add_option("file", weights_file, "File with one weight spec per line, or a two-column table")->required();

  std::string scenario_file, out_dir;
  bool quiet = false;
  auto* run_cmd = app.add_subcommand("run", "Run a scenario file and write its CSV and JSON reports");
  run_cmd->add_option("scenario", scenario_file, "Scenario file")->required();
  run_cmd->add_option("--out-dir", out_dir, "Directory for relative output paths");
  run_cmd->add_flag("-q,--quiet", quiet, "Do not echo the CSV");

  std::string json_file, format, output;
  auto* report_cmd = app.add_subcommand("report", "Convert a JSON report to CSV or Markdown");
  report_cmd->add_option("json", json_file, "JSON report")->required();
  report_cmd->add_option("--format", format, "csv or md")->required()->check(CLI::IsMember({"csv", "md"}));
  report_cmd->add_option("-o,--output", output, "Output file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    if (*check) return check_weights(weights_file);
    if (*run_cmd) return run(scenario_file, out_dir, quiet);
    if (*report_cmd) return report(json_file, format, output);
  } catch (const nucheck::ParseError& e) {
    std::cerr << "error";
    if (!e.field().empty()) std::cerr << " [" << e.field() << "]";
    std::cerr << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const nucheck::InvalidWeightError& e) {
    std::cerr << "invalid weight: " << e.what() << '\n';
    return kConfigError;
  } catch (const nucheck::Error& e) {
    std::cerr << "evaluation error: " << e.what() << '\n';
    return kEvaluationError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kEvaluationError;
  }
  return 0;
}
