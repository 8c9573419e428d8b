#include "ens/eval/report.hpp"

#include <cmath>
#include <cstdio>

#include "ens/core/error.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"
#include "ens/eval/metrics.hpp"

namespace ens::eval {

using nlohmann::json;

const std::vector<std::string>& metric_columns() {
  static const std::vector<std::string> cols = {"PPL", "B-4", "D-3", "BS-F1", "R-LEN", "EA", "ENSC"};
  return cols;
}

std::optional<double> metric_value(const MetricReport& r, const std::string& c) {
  if (c == "PPL") return r.ppl;
  if (c == "B-4") return r.b4;
  if (c == "D-3") return r.d3;
  if (c == "BS-F1") return r.bsf1;
  if (c == "R-LEN") return r.rlen;
  if (c == "EA") return r.ea;
  if (c == "ENSC") return r.ensc;
  throw Error(ErrorCode::kConfig, "unknown metric column " + c);
}

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

std::string row_label(const MetricReport& r) {
  std::string s = r.policy_id;
  if (r.tau1 && r.tau2 && r.tau3) {
    s += " (tau1=" + fmt(*r.tau1) + ", tau2=" + fmt(*r.tau2) + ", tau3=" + fmt(*r.tau3) + ")";
  }
  return s;
}

}  // namespace

std::string emit_markdown(const std::vector<MetricReport>& reports) {
  const auto& cols = metric_columns();
  std::vector<std::optional<double>> best(cols.size());
  for (std::size_t c = 0; c < cols.size(); ++c) {
    for (const auto& r : reports) {
      const auto v = metric_value(r, cols[c]);
      if (!v) continue;
      const bool lower = cols[c] == "PPL";
      if (!best[c] || (lower ? *v < *best[c] : *v > *best[c])) best[c] = *v;
    }
  }
  std::string out = "| policy | corpus |";
  for (const auto& c : cols) out += " " + c + " |";
  out += " n |\n|---|---|";
  for (std::size_t c = 0; c < cols.size(); ++c) out += "---|";
  out += "---|\n";
  for (const auto& r : reports) {
    out += "| " + row_label(r) + " | " + r.corpus_id + " |";
    for (std::size_t c = 0; c < cols.size(); ++c) {
      const auto v = metric_value(r, cols[c]);
      if (!v) {
        out += cols[c] == "ENSC" ? " insufficient data |" : " n/a |";
      } else if (best[c] && fmt(*v) == fmt(*best[c])) {
        out += " **" + fmt(*v) + "** |";
      } else {
        out += " " + fmt(*v) + " |";
      }
    }
    out += " " + std::to_string(r.samples) + " |";
    if (!r.error.empty()) out += " error: " + r.error;
    out += "\n";
  }
  return out;
}

json to_json(const MetricReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
  json metrics;
  for (const auto& c : metric_columns()) metrics[c] = opt(metric_value(r, c));
  return {{"corpus_id", r.corpus_id}, {"policy_id", r.policy_id}, {"metrics", metrics},
          {"samples", r.samples},     {"seed", r.seed},           {"tau1", opt(r.tau1)},
          {"tau2", opt(r.tau2)},      {"tau3", opt(r.tau3)},      {"error", r.error}};
}

MetricReport metric_report_from_json(const json& j) {
  try {
    auto opt = [](const json& v) { return v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()); };
    MetricReport r;
    r.corpus_id = j.at("corpus_id").get<std::string>();
    r.policy_id = j.at("policy_id").get<std::string>();
    const auto& m = j.at("metrics");
    r.ppl = opt(m.at("PPL"));
    r.b4 = opt(m.at("B-4"));
    r.d3 = opt(m.at("D-3"));
    r.bsf1 = opt(m.at("BS-F1"));
    r.rlen = opt(m.at("R-LEN"));
    r.ea = opt(m.at("EA"));
    r.ensc = opt(m.at("ENSC"));
    r.samples = j.at("samples").get<std::size_t>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.tau1 = opt(j.at("tau1"));
    r.tau2 = opt(j.at("tau2"));
    r.tau3 = opt(j.at("tau3"));
    r.error = j.value("error", "");
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad metric report: ") + e.what());
  }
}

std::string emit_json(const std::vector<MetricReport>& reports) {
  json arr = json::array();
  for (const auto& r : reports) arr.push_back(to_json(r));
  return json{{"columns", metric_columns()}, {"reports", arr}}.dump(2) + "\n";
}

std::vector<MetricReport> reports_from_json(const std::string& document) {
  json j;
  try {
    j = json::parse(document);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("report is not JSON: ") + e.what());
  }
  std::vector<MetricReport> out;
  for (const auto& r : j.at("reports")) out.push_back(metric_report_from_json(r));
  return out;
}

MetricReport evaluate_policy(const model::GenerativeBackend& policy, const model::Embedder& embedder,
                             const std::vector<training::LabeledRecord>& records,
                             const EvalOptions& options) {
  if (records.empty()) throw Error(ErrorCode::kEmptyBatch, "evaluation corpus is empty");
  MetricReport rep;
  rep.corpus_id = options.corpus_id;
  rep.policy_id = options.policy_id;
  rep.samples = records.size();
  rep.seed = options.decoding.seed;

  std::vector<PerplexityRecord> ppl;
  std::vector<std::string> cands, refs;
  std::vector<EmotionRecord> emotions;
  std::vector<StrategyRecord> strategies;
  for (const auto& r : records) {
    const auto prompt = training::render_prompt(r.context);
    ppl.push_back({prompt, training::target_of(r, options.mask).text});
    model::Decoding dec = options.decoding;
    dec.seed = text::derive_seed(options.decoding.seed, text::fnv1a(r.id));
    const auto sample = policy.sample(prompt, dec, 1);
    const auto parsed = parse_tagged_target(sample.empty() ? "" : sample.front(), options.mask);
    refs.push_back(r.response);
    cands.push_back(parsed ? parsed.value().response : std::string());
    std::optional<Emotion> reference;
    if (!r.context.empty() && r.context.back().emotion) reference = parse_emotion(*r.context.back().emotion);
    if (reference && options.mask.includes(Component::kEmotion)) {
      emotions.push_back({parsed ? parsed.value().rationale.emotion : std::nullopt, *reference});
    }
    if (parsed && parsed.value().rationale.strategy) {
      strategies.push_back({*parsed.value().rationale.strategy, parsed.value().response});
    }
  }
  rep.ppl = perplexity(policy, ppl, options.ppl_include_rationale);
  rep.b4 = bleu4(cands, refs);
  rep.d3 = distinct3(cands);
  rep.bsf1 = embedding_f1(cands, refs, embedder);
  rep.rlen = response_length(cands);
  rep.ea = emotion_appropriateness(emotions);
  const NearestCentroidJudge judge(embedder);
  rep.ensc = strategy_consistency(strategies, std::cref(judge));
  return rep;
}

}  // namespace ens::eval
