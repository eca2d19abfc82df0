#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "nucheck/criteria.hpp"
#include "nucheck/oplab.hpp"
#include "nucheck/weights.hpp"

namespace nucheck::report {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

Json complex_json(cplx z);

Json to_json(const SupResult& r);
Json to_json(const CriterionReport& r);
Json to_json(const NormalityReport& r);
Json to_json(const OperatorTruncation& t);
Json to_json(const NormLowerBound& b);
/// Nodes, weights, norms and total; the criterion report is included.
Json to_json(const NuclearDecomposition& d);
Json to_json(const SummingProbeResult& r);
Json to_json(const CompactnessResult& r);

/// Fixed CSV header:
/// scenario_id,task,kind,alpha,beta,gamma,rho,value,verdict,extrapolated,argmax_re,argmax_im,note
const std::vector<std::string>& csv_columns();

/// CSV of a scenario report (RFC 4180 quoting, "\n" line endings). Throws
/// ParseError when the document is not a scenario report of a known schema.
std::string to_csv(const Json& scenario_report);
/// The same rows as a Markdown table under a heading with the scenario id.
std::string to_markdown(const Json& scenario_report);

}  // namespace nucheck::report
