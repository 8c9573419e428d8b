#include "ens/training/pseudo_label.hpp"

#include <set>

#include "ens/core/error.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"

namespace ens::training {

using nlohmann::json;

std::string dedup_key(const std::string& context_id, const EnsCotRationale& rationale,
                      AblationMask mask) {
  // A constant response keeps the key independent of the answer text.
  auto keyed = apply_mask(rationale, mask);
  keyed.response = "-";
  const auto body = render_rationale_body(keyed, mask);
  return context_id + "\x1f" + text::normalize_for_dedup(body);
}

std::vector<PseudoLabelRecord> select_pseudo_labels(const UnlabeledRecord& record,
                                                    const std::vector<ScoredCompletion>& samples,
                                                    double tau3, AblationMask mask) {
  std::vector<PseudoLabelRecord> out;
  std::set<std::string> seen;
  for (const auto& s : samples) {
    if (!s.similarity || !(*s.similarity > tau3)) continue;
    auto parsed = parse_tagged_target(s.text, mask);
    if (!parsed) continue;
    EnsCotRationale r = parsed.value().rationale;
    if (!seen.insert(dedup_key(record.id, r, mask)).second) continue;
    r.response = record.response;
    out.push_back({record.id, record.context, std::move(r), record.response, *s.similarity});
  }
  return out;
}

std::vector<PseudoLabelRecord> build_pseudo_labels(const model::GenerativeBackend& policy,
                                                   const model::Embedder& embedder,
                                                   const std::vector<UnlabeledRecord>& corpus,
                                                   const TrainingConfig& config,
                                                   std::uint64_t round_seed) {
  if (config.m < 1) throw Error(ErrorCode::kConfig, "pseudo-labeling needs m >= 1");
  const auto scored = sample_and_score(policy, embedder, corpus, config, config.m, round_seed);
  std::vector<PseudoLabelRecord> out;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    auto recs = select_pseudo_labels(corpus[i], scored[i], config.tau3, config.mask);
    out.insert(out.end(), std::make_move_iterator(recs.begin()), std::make_move_iterator(recs.end()));
  }
  return out;
}

LabeledRecord to_labeled(const PseudoLabelRecord& r) {
  return LabeledRecord{r.context_id, r.context, r.rationale, r.response, "pseudo"};
}

json to_json(const PseudoLabelRecord& r) {
  json j = to_json(to_labeled(r));
  j["similarity"] = r.similarity;
  return j;
}

}  // namespace ens::training
