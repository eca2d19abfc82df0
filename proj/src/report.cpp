#include "nucheck/report.hpp"

#include <cmath>

#include "nucheck/error.hpp"
#include "nucheck/text.hpp"

namespace nucheck::report {

namespace {

using Row = std::vector<std::string>;

std::string num(const Json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return text::format_number(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

// Non-finite doubles have no JSON literal; they are stored as strings.
Json real(double x) {
  if (std::isfinite(x)) return x;
  if (std::isnan(x)) return "nan";
  return x > 0 ? "inf" : "-inf";
}

std::string field(const Json& obj, const char* key) {
  return obj.contains(key) ? num(obj.at(key)) : "";
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string md_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += '\\';
    out += c == '\n' ? ' ' : c;
  }
  return out;
}

struct RowBuilder {
  const Json& scenario;
  std::vector<Row> rows;

  Row base(const Json& result, const std::string& kind) const {
    Row r(csv_columns().size());
    r[0] = scenario.value("id", "");
    r[1] = result.value("task", "");
    r[2] = kind;
    const Json& params = result.contains("alpha") ? result : scenario;
    r[3] = field(params, "alpha");
    r[4] = field(params, "beta");
    r[5] = field(params, "gamma");
    return r;
  }

  void criterion(const Json& result, const Json& c) {
    const std::string label = c.value("label", "");
    for (const Json& s : c.at("schedule")) {
      Row r = base(c, label);
      r[1] = result.value("task", "");
      r[6] = num(s.at("rho"));
      r[7] = num(s.at("value"));
      if (s.contains("argmax")) {
        r[10] = num(s.at("argmax").at(0));
        r[11] = num(s.at("argmax").at(1));
      }
      rows.push_back(r);
    }
    Row r = base(c, label);
    r[1] = result.value("task", "");
    const Json& v = c.at("verdict");
    r[7] = num(v.at("value"));
    r[8] = num(v.at("kind"));
    r[9] = num(v.at("extrapolated"));
    std::string note = "exponent=" + num(v.at("exponent"));
    if (v.value("sublinear", false)) note += "; sublinear";
    if (c.contains("normal_pair_ok")) note += std::string("; normal_pair=") + num(c.at("normal_pair_ok"));
    if (!c.value("note", "").empty()) note += "; " + c.value("note", "");
    r[12] = note;
    rows.push_back(r);
  }

  void add(const Json& result) {
    const std::string type = result.at("type").get<std::string>();
    if (type == "criterion") {
      criterion(result, result.at("report"));
    } else if (type == "criterion_pair") {
      criterion(result, result.at("printed"));
      criterion(result, result.at("derived"));
    } else if (type == "sup") {
      Row r = base(result, "sup");
      r[7] = num(result.at("value"));
      r[8] = result.at("unbounded").get<bool>() ? "Unbounded" : "Bounded";
      r[10] = num(result.at("argmax").at(0));
      r[11] = num(result.at("argmax").at(1));
      rows.push_back(r);
    } else if (type == "normality") {
      Row r = base(result, "normality:" + result.value("weight", ""));
      r[7] = num(result.at("condition_i_inf"));
      r[8] = num(result.at("verdict"));
      r[12] = "spec=" + num(result.at("spec")) + "; beta=" + num(result.at("beta_estimate")) +
              "; gamma=" + num(result.at("gamma_estimate")) + "; k=" + num(result.at("condition_ii_k"));
      rows.push_back(r);
    } else if (type == "truncation") {
      Row r = base(result, "truncation:" + num(result.at("operator")));
      r[7] = num(result.at("frobenius"));
      r[12] = "N=" + num(result.at("degree")) + "; rows=" + num(result.at("rows")) +
              "; cols=" + num(result.at("cols")) + "; basis=" + num(result.at("normalization"));
      rows.push_back(r);
    } else if (type == "norm_lower") {
      Row r = base(result, "norm_lower:" + num(result.at("operator")));
      r[7] = num(result.at("bound"));
      r[12] = "witness=" + num(result.at("witness")) + "; probes=" + num(result.at("probes_used"));
      rows.push_back(r);
    } else if (type == "nuclear") {
      Row r = base(result, "nuclear:" + num(result.at("operator")));
      r[7] = num(result.at("total"));
      r[8] = "Finite";
      r[12] = "terms=" + std::to_string(result.at("terms").size()) + "; inner=" + num(result.at("total_inner")) +
              "; outer=" + num(result.at("total_outer"));
      rows.push_back(r);
    } else if (type == "refusal") {
      Row r = base(result, "refusal");
      r[8] = "Refused";
      r[12] = num(result.at("message"));
      rows.push_back(r);
    } else if (type == "as_probe") {
      Row r = base(result, "as_probe:" + num(result.at("operator")));
      r[7] = num(result.at("ratio"));
      r[12] = "image_sum=" + num(result.at("image_sum")) + "; source_sup=" + num(result.at("source_sup"));
      rows.push_back(r);
    } else if (type == "compactness") {
      Row r = base(result, "compactness:" + num(result.at("operator")));
      const Json& norms = result.at("norms");
      r[7] = norms.empty() ? "" : num(norms.back());
      r[8] = num(result.at("verdict"));
      r[12] = "N=" + std::to_string(norms.size() - 1);
      rows.push_back(r);
    } else if (type == "error") {
      Row r = base(result, "error");
      r[8] = "Error";
      r[12] = num(result.at("error_class")) + ": " + num(result.at("message"));
      rows.push_back(r);
    } else {
      throw ParseError("unknown result type '" + type + "'", 0, "type");
    }
  }
};

std::vector<Row> rows_of(const Json& doc) {
  if (!doc.is_object() || !doc.contains("schema_version") || !doc.contains("scenario") ||
      !doc.contains("results")) {
    throw ParseError("not a scenario report (missing schema_version, scenario or results)", 0, "report");
  }
  if (doc.at("schema_version") != kSchemaVersion) {
    throw ParseError("unsupported report schema_version " + doc.at("schema_version").dump(), 0,
                     "schema_version");
  }
  try {
    RowBuilder b{doc.at("scenario"), {}};
    for (const Json& result : doc.at("results")) b.add(result);
    return b.rows;
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed scenario report: ") + e.what(), 0, "report");
  }
}

}  // namespace

Json complex_json(cplx z) { return Json::array({real(z.real()), real(z.imag())}); }

Json to_json(const SupResult& r) {
  Json j;
  j["value"] = real(r.value);
  j["argmax"] = complex_json(r.argmax);
  j["unbounded"] = r.unbounded;
  return j;
}

Json to_json(const CriterionReport& r) {
  Json j;
  j["label"] = r.label;
  j["operator"] = to_string(r.kind);
  j["family"] = r.family == FactorFamily::Weighted ? "weighted" : "bloch";
  j["numerator"] = to_string(r.numerator);
  j["alpha"] = r.alpha;
  if (r.beta) j["beta"] = *r.beta;
  if (r.gamma) j["gamma"] = *r.gamma;
  // Argmax diagnostic per ring: the outermost angle-0 node of that ring.
  std::vector<const CriterionNode*> ring_node(r.values.size(), nullptr);
  for (const auto& n : r.diagnostics) {
    if (n.ring >= 0 && static_cast<std::size_t>(n.ring) < ring_node.size()) ring_node[n.ring] = &n;
  }
  Json schedule = Json::array();
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    Json s;
    s["k"] = r.ks[i];
    s["rho"] = r.radii[i];
    s["value"] = real(r.values[i]);
    if (ring_node[i]) s["argmax"] = complex_json(ring_node[i]->inner.argmax);
    schedule.push_back(s);
  }
  j["schedule"] = schedule;
  Json v;
  v["kind"] = to_string(r.verdict.kind);
  v["value"] = real(r.verdict.value);
  v["exponent"] = real(r.verdict.exponent);
  v["extrapolated"] = r.verdict.extrapolated;
  v["sublinear"] = r.verdict.sublinear;
  j["verdict"] = v;
  if (r.normal_pair_ok) j["normal_pair_ok"] = *r.normal_pair_ok;
  j["note"] = r.note;
  if (r.unbounded_node) j["unbounded_node"] = complex_json(r.unbounded_node->zeta);
  Json diag = Json::array();
  for (const auto& n : r.diagnostics) {
    Json d;
    d["zeta"] = complex_json(n.zeta);
    d["ring"] = n.ring;
    d["inner"] = real(n.inner.value);
    d["argmax"] = complex_json(n.inner.argmax);
    if (n.inner.unbounded) d["unbounded"] = true;
    diag.push_back(d);
  }
  j["diagnostics"] = diag;
  return j;
}

Json to_json(const NormalityReport& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["condition_i_inf"] = real(r.condition_i_inf);
  j["condition_i_ratios"] = Json::array();
  for (double x : r.condition_i_ratios) j["condition_i_ratios"].push_back(real(x));
  j["beta_estimate"] = r.beta_estimate ? Json(*r.beta_estimate) : Json();
  j["gamma_estimate"] = r.gamma_estimate ? Json(*r.gamma_estimate) : Json();
  j["condition_ii_k"] = r.condition_ii_k ? Json(*r.condition_ii_k) : Json();
  j["certified"] = r.certified;
  return j;
}

Json to_json(const OperatorTruncation& t) {
  Json j;
  j["operator"] = to_string(t.kind);
  j["degree"] = t.degree;
  j["normalization"] = t.normalization == BasisNormalization::Raw ? "raw" : "source_normalized";
  j["rows"] = t.matrix.rows();
  j["cols"] = t.matrix.cols();
  j["frobenius"] = t.matrix.norm();
  Json cols = Json::array();
  for (Eigen::Index c = 0; c < t.matrix.cols(); ++c) {
    Json col = Json::array();
    for (Eigen::Index r = 0; r < t.matrix.rows(); ++r) col.push_back(complex_json(t.matrix(r, c)));
    cols.push_back(col);
  }
  j["columns"] = cols;
  return j;
}

Json to_json(const NormLowerBound& b) {
  Json j;
  j["bound"] = real(b.bound);
  j["witness"] = b.witness;
  j["probes_used"] = b.probes_used;
  return j;
}

Json to_json(const NuclearDecomposition& d) {
  Json j;
  j["operator"] = to_string(d.kind);
  j["alpha"] = d.alpha;
  j["g"] = d.g.to_string();
  j["phi"] = d.phi.to_string();
  j["nu"] = d.nu.spec();
  j["mu"] = d.mu.spec();
  j["total"] = real(d.total);
  j["total_inner"] = real(d.total_inner);
  j["total_outer"] = real(d.total_outer);
  j["functional_norm_exact"] = d.functional_norm_exact;
  Json terms = Json::array();
  for (const auto& t : d.terms) {
    Json x;
    x["zeta"] = complex_json(t.zeta);
    x["weight"] = real(t.weight);
    x["functional_norm"] = real(t.functional_norm);
    x["image_norm"] = real(t.image_norm);
    x["bound"] = real(t.bound);
    terms.push_back(x);
  }
  j["terms"] = terms;
  j["criterion"] = to_json(d.criterion);
  return j;
}

Json to_json(const SummingProbeResult& r) {
  Json j;
  j["ratio"] = real(r.ratio);
  j["image_sum"] = real(r.image_sum);
  j["source_sup"] = real(r.source_sup);
  j["eta"] = Json::array();
  for (cplx e : r.best_eta) j["eta"].push_back(complex_json(e));
  return j;
}

Json to_json(const CompactnessResult& r) {
  Json j;
  j["verdict"] = to_string(r.verdict);
  j["norms"] = Json::array();
  for (double x : r.norms) j["norms"].push_back(real(x));
  j["membership"] = Json::array();
  for (Membership m : r.membership) j["membership"].push_back(to_string(m));
  return j;
}

const std::vector<std::string>& csv_columns() {
  static const std::vector<std::string> cols{"scenario_id", "task",  "kind",       "alpha",     "beta",
                                             "gamma",       "rho",   "value",      "verdict",   "extrapolated",
                                             "argmax_re",   "argmax_im", "note"};
  return cols;
}

std::string to_csv(const Json& doc) {
  const auto rows = rows_of(doc);
  std::string out;
  auto emit = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (i) out += ',';
      out += csv_escape(r[i]);
    }
    out += '\n';
  };
  emit(csv_columns());
  for (const Row& r : rows) emit(r);
  return out;
}

std::string to_markdown(const Json& doc) {
  const auto rows = rows_of(doc);
  std::string out = "# Scenario " + md_escape(doc.at("scenario").value("id", "")) + "\n\n";
  auto emit = [&](const Row& r) {
    out += '|';
    for (const auto& c : r) out += ' ' + md_escape(c) + " |";
    out += '\n';
  };
  emit(csv_columns());
  out += '|';
  for (std::size_t i = 0; i < csv_columns().size(); ++i) out += " --- |";
  out += '\n';
  for (const Row& r : rows) emit(r);
  return out;
}

}  // namespace nucheck::report
