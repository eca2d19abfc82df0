#include "nucheck/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "nucheck/error.hpp"
#include "nucheck/oplab.hpp"
#include "nucheck/text.hpp"

namespace nucheck {

const std::vector<std::string> kScenarioTasks{"normality", "m1",      "s_sup",      "m_alpha",  "n_alpha",
                                              "p_alpha",   "q_alpha", "bloch_m",    "truncate", "norm_lower",
                                              "nuclear",   "as_probe", "compactness"};

const std::vector<std::string> kResolutionKeys{
    "k_min",        "k_max",        "disk_radial",  "annulus_radial",  "n_theta",        "max_theta_doublings",
    "extend_to",    "inner_radial", "inner_angular", "inner_depth",    "sup_radial",     "sup_angular",
    "sup_depth",    "truncate_degree", "compact_degree", "probe_degree"};

namespace {

namespace fs = std::filesystem;

bool contains(const std::vector<std::string>& v, const std::string& x) {
  return std::find(v.begin(), v.end(), x) != v.end();
}

RadialWeight load_weight(const std::string& spec, const std::string& base_dir) {
  std::string_view s = text::trim(spec);
  if (s.rfind("table:", 0) == 0 && !base_dir.empty()) {
    const fs::path p(std::string(text::trim(s.substr(6))));
    if (p.is_relative()) return RadialWeight::parse("table:" + (fs::path(base_dir) / p).string());
  }
  return RadialWeight::parse(s);
}

struct Requirements {
  bool nu = false, mu = false, g = false, phi = false, alpha = false, bloch = false, family = false,
       polynomial = false;
};

Requirements requirements(const std::string& task) {
  Requirements r;
  if (task == "normality") {
    r.nu = true;
    return r;
  }
  r.g = r.phi = true;
  if (task == "p_alpha" || task == "q_alpha") {
    r.alpha = r.bloch = true;
    return r;
  }
  if (task == "bloch_m") return r;
  if (task == "truncate") {
    r.polynomial = true;
    return r;
  }
  r.nu = r.mu = true;
  if (task == "m_alpha" || task == "n_alpha" || task == "nuclear") r.alpha = true;
  if (task == "as_probe") r.family = true;
  if (task == "compactness") r.polynomial = true;
  return r;
}

int resolution_value(const ScenarioConfig& c, const std::string& key, int fallback) {
  const auto it = c.resolution.find(key);
  return it == c.resolution.end() ? fallback : it->second;
}

CriterionResolution criterion_resolution(const ScenarioConfig& c) {
  CriterionResolution r;
  r.k_min = resolution_value(c, "k_min", r.k_min);
  r.k_max = resolution_value(c, "k_max", r.k_max);
  r.disk_radial = resolution_value(c, "disk_radial", r.disk_radial);
  r.annulus_radial = resolution_value(c, "annulus_radial", r.annulus_radial);
  r.n_theta = resolution_value(c, "n_theta", r.n_theta);
  r.max_theta_doublings = resolution_value(c, "max_theta_doublings", r.max_theta_doublings);
  r.extend_to = resolution_value(c, "extend_to", r.extend_to);
  r.inner.n_radial = resolution_value(c, "inner_radial", r.inner.n_radial);
  r.inner.n_angular = resolution_value(c, "inner_angular", r.inner.n_angular);
  r.inner.boundary_depth = resolution_value(c, "inner_depth", r.inner.boundary_depth);
  return r;
}

SupSolverConfig sup_config(const ScenarioConfig& c) {
  SupSolverConfig s;
  s.n_radial = resolution_value(c, "sup_radial", s.n_radial);
  s.n_angular = resolution_value(c, "sup_angular", s.n_angular);
  s.boundary_depth = resolution_value(c, "sup_depth", s.boundary_depth);
  return s;
}

std::vector<std::string> split_list(std::string_view s, char sep) {
  std::vector<std::string> out;
  for (const auto& part : text::split(s, sep)) {
    const auto t = text::trim(part);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

struct Built {
  std::optional<RadialWeight> nu, mu;
  std::optional<AnalyticFunction> g;
  std::optional<SelfMap> phi;
  std::vector<AnalyticFunction> family;
};

Built build(const ScenarioConfig& c) {
  Built b;
  auto weight = [&](const std::optional<std::string>& spec, const char* name) -> std::optional<RadialWeight> {
    if (!spec) return std::nullopt;
    try {
      return load_weight(*spec, c.base_dir);
    } catch (const ParseError& e) {
      throw ParseError(std::string(name) + ": " + e.what(), 0, name);
    }
  };
  auto function = [&](const std::string& spec, const std::string& name) {
    try {
      return AnalyticFunction::parse(spec);
    } catch (const ParseError& e) {
      throw ParseError(name + ": " + e.what(), 0, name);
    }
  };
  b.nu = weight(c.nu, "nu");
  b.mu = weight(c.mu, "mu");
  if (c.g) b.g = function(*c.g, "g");
  if (c.phi) {
    const AnalyticFunction f = function(*c.phi, "phi");
    try {
      b.phi.emplace(f);
    } catch (const DomainError& e) {
      throw ParseError(std::string("phi: ") + e.what(), 0, "phi");
    }
  }
  for (std::size_t i = 0; i < c.family.size(); ++i) {
    b.family.push_back(function(c.family[i], "family[" + std::to_string(i) + "]"));
  }
  return b;
}

void validate(const ScenarioConfig& c, const Built& b) {
  if (c.id.empty()) throw ParseError("missing scenario id", 0, "id");
  for (char ch : c.id) {
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) {
      throw ParseError("scenario id may only contain letters, digits, '_', '-' and '.'", 0, "id");
    }
  }
  if (c.tasks.empty()) throw ParseError("task list is empty", 0, "tasks");
  for (const auto& task : c.tasks) {
    const Requirements r = requirements(task);
    auto need = [&](bool present, const char* field) {
      if (!present) throw ParseError("task '" + task + "' requires " + field, 0, field);
    };
    if (r.nu) need(c.nu.has_value(), "nu");
    if (r.mu) need(c.mu.has_value(), "mu");
    if (r.g) need(c.g.has_value(), "g");
    if (r.phi) need(c.phi.has_value(), "phi");
    if (r.alpha) need(c.alpha.has_value(), "alpha");
    if (r.bloch) {
      need(c.beta.has_value(), "beta");
      need(c.gamma.has_value(), "gamma");
    }
    if (r.family) need(!c.family.empty(), "family");
    if (r.polynomial) {
      if (!b.g->is_polynomial()) throw ParseError("task '" + task + "' requires a polynomial g", 0, "g");
      if (!b.phi->function().is_polynomial()) {
        throw ParseError("task '" + task + "' requires a polynomial phi", 0, "phi");
      }
    }
  }
  if (c.family.size() > 8) throw ParseError("family has more than 8 members", 0, "family");
  if (c.alpha && !(*c.alpha > -1.0)) throw ParseError("alpha must be > -1", 0, "alpha");
  try {
    criterion_resolution(c).validate();
    sup_config(c).validate();
  } catch (const PreconditionError& e) {
    throw ParseError(std::string("resolution: ") + e.what(), 0, "resolution");
  }
  const int td = resolution_value(c, "truncate_degree", 64);
  if (td < 0 || td > 256) throw ParseError("truncate_degree must lie in [0, 256]", 0, "truncate_degree");
  if (resolution_value(c, "compact_degree", 24) < 4) {
    throw ParseError("compact_degree must be >= 4", 0, "compact_degree");
  }
  if (resolution_value(c, "probe_degree", 8) < 0) throw ParseError("probe_degree must be >= 0", 0, "probe_degree");
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? sep : "") + v[i];
  return out;
}

report::Json scenario_json(const ScenarioConfig& c) {
  report::Json j;
  j["id"] = c.id;
  if (c.nu) j["nu"] = *c.nu;
  if (c.mu) j["mu"] = *c.mu;
  if (c.g) j["g"] = *c.g;
  if (c.phi) j["phi"] = *c.phi;
  if (!c.family.empty()) j["family"] = c.family;
  j["operator"] = to_string(c.op);
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.beta) j["beta"] = *c.beta;
  if (c.gamma) j["gamma"] = *c.gamma;
  j["tasks"] = c.tasks;
  report::Json res = report::Json::object();
  for (const auto& [k, v] : c.resolution) res[k] = v;
  j["resolution"] = res;
  return j;
}

std::string error_class(const Error& e) {
  if (dynamic_cast<const EvaluationError*>(&e)) return "EvaluationError";
  if (dynamic_cast<const DivergenceError*>(&e)) return "DivergenceError";
  if (dynamic_cast<const ResolutionError*>(&e)) return "ResolutionError";
  if (dynamic_cast<const DomainError*>(&e)) return "DomainError";
  if (dynamic_cast<const PreconditionError*>(&e)) return "PreconditionError";
  if (dynamic_cast<const InvalidWeightError*>(&e)) return "InvalidWeightError";
  if (dynamic_cast<const UnsupportedError*>(&e)) return "UnsupportedError";
  return "Error";
}

std::string resolve_output(const std::string& path, const std::string& out_dir) {
  const fs::path p(path);
  if (p.is_absolute() || out_dir.empty()) return p.string();
  return (fs::path(out_dir) / p).string();
}

void write_file(const std::string& path, const std::string& contents) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out << contents;
  if (!out) throw ResolutionError("cannot write output file '" + path + "'");
}

}  // namespace

bool ScenarioConfig::operator==(const ScenarioConfig& o) const {
  return id == o.id && nu == o.nu && mu == o.mu && g == o.g && phi == o.phi && family == o.family &&
         alpha == o.alpha && beta == o.beta && gamma == o.gamma && op == o.op && tasks == o.tasks &&
         resolution == o.resolution && csv == o.csv && json == o.json;
}

ScenarioConfig parse_scenario(std::string_view text, const std::string& base_dir) {
  static const std::map<std::string, std::vector<std::string>> sections{
      {"scenario", {"id"}},
      {"weights", {"nu", "mu"}},
      {"functions", {"g", "phi", "family"}},
      {"parameters", {"alpha", "beta", "gamma", "operator"}},
      {"tasks", {"list"}},
      {"resolution", kResolutionKeys},
      {"output", {"csv", "json"}},
  };
  ScenarioConfig c;
  c.base_dir = base_dir;
  std::string section;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = text::trim(raw);
    if (line.empty() || line.front() == '#') continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ParseError("malformed section header", line_no, "section");
      section = std::string(text::trim(line.substr(1, line.size() - 2)));
      if (!sections.count(section)) throw ParseError("unknown section [" + section + "]", line_no, section);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError("expected 'key = value'", line_no, "line");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    if (section.empty()) throw ParseError("entry '" + key + "' outside any section", line_no, key);
    if (!contains(sections.at(section), key)) {
      throw ParseError("unknown key '" + key + "' in [" + section + "]", line_no, key);
    }
    if (!seen.insert(section + "." + key).second) throw ParseError("duplicate key '" + key + "'", line_no, key);
    if (value.empty()) throw ParseError("empty value for '" + key + "'", line_no, key);
    const std::string v(value);
    try {
      if (key == "id") {
        c.id = v;
      } else if (key == "nu" || key == "mu") {
        load_weight(v, base_dir);
        (key == "nu" ? c.nu : c.mu) = v;
      } else if (key == "g" || key == "phi") {
        AnalyticFunction::parse(v);
        (key == "g" ? c.g : c.phi) = v;
      } else if (key == "family") {
        c.family = split_list(v, '|');
        for (const auto& f : c.family) AnalyticFunction::parse(f);
      } else if (key == "alpha" || key == "beta" || key == "gamma") {
        const double x = text::parse_double(v, key);
        (key == "alpha" ? c.alpha : key == "beta" ? c.beta : c.gamma) = x;
      } else if (key == "operator") {
        if (v == "T") {
          c.op = OperatorKind::T;
        } else if (v == "S") {
          c.op = OperatorKind::S;
        } else {
          throw ParseError("operator must be T or S", line_no, key);
        }
      } else if (key == "list") {
        c.tasks = split_list(v, ',');
        for (const auto& t : c.tasks) {
          if (!contains(kScenarioTasks, t)) throw ParseError("unknown task '" + t + "'", line_no, "tasks");
        }
      } else if (section == "resolution") {
        c.resolution[key] = text::parse_int(v, key);
      } else if (key == "csv") {
        c.csv = v;
      } else if (key == "json") {
        c.json = v;
      }
    } catch (const ParseError& e) {
      if (e.line() > 0) throw;
      throw ParseError(e.what(), line_no, key);
    }
  }
  validate(c, build(c));
  return c;
}

ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open scenario file '" + path + "'", 0, "file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str(), fs::path(path).parent_path().string());
}

std::string serialize_scenario(const ScenarioConfig& c) {
  std::string out = "[scenario]\nid = " + c.id + "\n";
  if (c.nu || c.mu) {
    out += "\n[weights]\n";
    if (c.nu) out += "nu = " + *c.nu + "\n";
    if (c.mu) out += "mu = " + *c.mu + "\n";
  }
  if (c.g || c.phi || !c.family.empty()) {
    out += "\n[functions]\n";
    if (c.g) out += "g = " + *c.g + "\n";
    if (c.phi) out += "phi = " + *c.phi + "\n";
    if (!c.family.empty()) out += "family = " + join(c.family, " | ") + "\n";
  }
  out += "\n[parameters]\n";
  if (c.alpha) out += "alpha = " + text::format_number(*c.alpha) + "\n";
  if (c.beta) out += "beta = " + text::format_number(*c.beta) + "\n";
  if (c.gamma) out += "gamma = " + text::format_number(*c.gamma) + "\n";
  out += "operator = " + to_string(c.op) + "\n";
  out += "\n[tasks]\nlist = " + join(c.tasks, ", ") + "\n";
  if (!c.resolution.empty()) {
    out += "\n[resolution]\n";
    for (const auto& [k, v] : c.resolution) out += k + " = " + std::to_string(v) + "\n";
  }
  if (c.csv || c.json) {
    out += "\n[output]\n";
    if (c.csv) out += "csv = " + *c.csv + "\n";
    if (c.json) out += "json = " + *c.json + "\n";
  }
  return out;
}

ScenarioOutcome run_scenario(const ScenarioConfig& c, const RunOptions& options) {
  const Built b = build(c);
  validate(c, b);
  const CriterionResolution res = criterion_resolution(c);
  const SupSolverConfig sup = sup_config(c);

  ScenarioOutcome out;
  report::Json doc;
  doc["schema_version"] = report::kSchemaVersion;
  doc["scenario"] = scenario_json(c);
  doc["results"] = report::Json::array();
  auto& results = doc["results"];
  std::string status = "ok";

  for (const std::string& task : c.tasks) {
    report::Json r;
    r["task"] = task;
    try {
      if (task == "normality") {
        for (const auto& [name, w] : {std::pair{"nu", b.nu}, std::pair{"mu", b.mu}}) {
          if (!w) continue;
          report::Json n;
          n["task"] = task;
          n["type"] = "normality";
          n["weight"] = name;
          n["spec"] = w->spec();
          n.update(report::to_json(check_normality(*w)));
          results.push_back(n);
        }
        continue;
      }
      if (task == "m1" || task == "s_sup") {
        const SupResult s = task == "m1" ? criterion_M1(*b.g, *b.phi, *b.nu, *b.mu, sup)
                                         : criterion_S_sup(*b.g, *b.phi, *b.nu, *b.mu, sup);
        r["type"] = "sup";
        r.update(report::to_json(s));
      } else if (task == "m_alpha" || task == "n_alpha") {
        r["type"] = "criterion";
        r["report"] = report::to_json(task == "m_alpha" ? m_alpha(*b.g, *b.phi, *b.nu, *b.mu, *c.alpha, res)
                                                        : n_alpha(*b.g, *b.phi, *b.nu, *b.mu, *c.alpha, res));
      } else if (task == "p_alpha" || task == "q_alpha") {
        r["type"] = "criterion";
        r["report"] = report::to_json(task == "p_alpha" ? p_alpha(*b.g, *b.phi, *c.beta, *c.gamma, *c.alpha, res)
                                                        : q_alpha(*b.g, *b.phi, *c.beta, *c.gamma, *c.alpha, res));
      } else if (task == "bloch_m") {
        const BlochMReports m = criterion_bloch_M(*b.g, *b.phi, res);
        r["type"] = "criterion_pair";
        r["printed"] = report::to_json(m.printed);
        r["derived"] = report::to_json(m.derived);
      } else if (task == "truncate") {
        r["type"] = "truncation";
        r.update(report::to_json(truncation_matrix(c.op, *b.g, *b.phi, resolution_value(c, "truncate_degree", 64))));
      } else if (task == "norm_lower") {
        ProbeSet probes;
        probes.max_degree = resolution_value(c, "probe_degree", 8);
        probes.solver = sup;
        r["type"] = "norm_lower";
        r["operator"] = to_string(c.op);
        r.update(report::to_json(operator_norm_lower(c.op, *b.g, *b.phi, *b.nu, *b.mu, probes)));
      } else if (task == "nuclear") {
        try {
          const NuclearDecomposition d = nuclear_decomposition(c.op, *b.g, *b.phi, *b.nu, *b.mu, *c.alpha, res);
          r["type"] = "nuclear";
          r.update(report::to_json(d));
        } catch (const RefusalError& e) {
          r["type"] = "refusal";
          r["message"] = e.what();
        }
      } else if (task == "as_probe") {
        r["type"] = "as_probe";
        r["operator"] = to_string(c.op);
        r.update(report::to_json(
            absolutely_summing_probe(c.op, *b.g, *b.phi, *b.nu, *b.mu, b.family, TargetNorm::Bloch, sup)));
      } else if (task == "compactness") {
        r["type"] = "compactness";
        r["operator"] = to_string(c.op);
        r.update(report::to_json(
            compactness_probe(c.op, *b.g, *b.phi, *b.nu, *b.mu, resolution_value(c, "compact_degree", 24))));
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      report::Json err;
      err["task"] = task;
      err["type"] = "error";
      err["error_class"] = error_class(e);
      err["message"] = e.what();
      results.push_back(err);
      status = "error";
      out.exit_code = 3;
      break;
    }
    results.push_back(r);
  }
  doc["status"] = status;

  out.csv = report::to_csv(doc);
  out.report = std::move(doc);
  out.csv_path = resolve_output(c.csv.value_or(c.id + ".csv"), options.out_dir);
  out.json_path = resolve_output(c.json.value_or(c.id + ".json"), options.out_dir);
  if (options.write_files) {
    write_file(out.csv_path, out.csv);
    write_file(out.json_path, out.report.dump(2) + "\n");
  }
  return out;
}

}  // namespace nucheck
