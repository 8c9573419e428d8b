#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens/model/backend.hpp"
#include "ens/training/records.hpp"

namespace ens::eval {

struct MetricReport {
  std::string corpus_id;
  std::string policy_id;
  std::optional<double> ppl, b4, d3, bsf1, rlen, ea, ensc;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  // Sweep rows carry their thresholds.
  std::optional<double> tau1, tau2, tau3;
  std::string error;  // set when the run producing this row failed

  bool operator==(const MetricReport&) const = default;
};

// Column order of the markdown and JSON documents.
const std::vector<std::string>& metric_columns();  // PPL, B-4, D-3, BS-F1, R-LEN, EA, ENSC

std::optional<double> metric_value(const MetricReport& r, const std::string& column);

// Best value per column (PPL lowest, the rest highest); ties all marked.
// Absent values print as "n/a" (ENSC: "insufficient data").
std::string emit_markdown(const std::vector<MetricReport>& reports);
std::string emit_json(const std::vector<MetricReport>& reports);
std::vector<MetricReport> reports_from_json(const std::string& document);

nlohmann::json to_json(const MetricReport& report);
MetricReport metric_report_from_json(const nlohmann::json& j);

struct EvalOptions {
  model::Decoding decoding{0.0, 1.0, 0};  // greedy by default
  AblationMask mask = AblationMask::full();
  bool ppl_include_rationale = false;
  std::string corpus_id = "test";
  std::string policy_id = "policy";
};

// Samples one completion per record, scores the answer spans against the
// references and the rationales against the reference user emotion and the
// strategy exemplars. Unparseable completions count as empty responses.
MetricReport evaluate_policy(const model::GenerativeBackend& policy, const model::Embedder& embedder,
                             const std::vector<training::LabeledRecord>& records,
                             const EvalOptions& options);

}  // namespace ens::eval
