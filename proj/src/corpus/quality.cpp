#include "ens/corpus/quality.hpp"

#include <algorithm>

#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"

namespace ens::corpus {

using nlohmann::json;

void validate_rating(const QualityRating& r) {
  for (auto c : kQualityCriteria) {
    auto it = r.scores.find(std::string(c));
    if (it == r.scores.end()) {
      throw Error(ErrorCode::kSchema, "rating of " + r.dialogue_id + " by " + r.rater_id +
                                          " lacks criterion " + std::string(c));
    }
    if (it->second < 1 || it->second > 5) {
      throw Error(ErrorCode::kSchema, "rating of " + r.dialogue_id + " by " + r.rater_id + ": " +
                                          std::string(c) + " outside [1,5]");
    }
  }
  for (const auto& [k, v] : r.scores) {
    if (std::find(kQualityCriteria.begin(), kQualityCriteria.end(), k) == kQualityCriteria.end()) {
      throw Error(ErrorCode::kSchema, "unknown quality criterion " + k);
    }
  }
}

FilterResult filter_corpus(const std::vector<Dialogue>& dialogues,
                           const std::vector<QualityRating>& ratings, double threshold) {
  std::map<std::string, std::vector<const QualityRating*>> by_dialogue;
  for (const auto& r : ratings) {
    validate_rating(r);
    by_dialogue[r.dialogue_id].push_back(&r);
  }
  FilterResult out;
  for (const auto& d : dialogues) {
    auto it = by_dialogue.find(d.id);
    if (it == by_dialogue.end()) {
      throw Error(ErrorCode::kMissingRating, "dialogue " + d.id + " has no rating");
    }
    RetentionDecision dec;
    dec.dialogue_id = d.id;
    dec.retained = true;
    for (auto c : kQualityCriteria) {
      double sum = 0.0;
      for (const auto* r : it->second) sum += r->scores.at(std::string(c));
      const double mean = sum / static_cast<double>(it->second.size());
      dec.means[std::string(c)] = mean;
      if (mean < threshold && dec.retained) {
        dec.retained = false;
        dec.reason = std::string(c) + " mean " + std::to_string(mean) + " below threshold";
      }
    }
    if (dec.retained) {
      Dialogue kept = d;
      kept.quality_ratings = dec.means;
      out.retained.push_back(std::move(kept));
    }
    out.decisions.push_back(std::move(dec));
  }
  return out;
}

json to_json(const QualityRating& r) {
  return {{"dialogue_id", r.dialogue_id}, {"rater_id", r.rater_id}, {"scores", r.scores}};
}

QualityRating quality_rating_from_json(const json& j) {
  try {
    QualityRating r{j.at("dialogue_id").get<std::string>(), j.at("rater_id").get<std::string>(),
                    j.at("scores").get<std::map<std::string, int>>()};
    validate_rating(r);
    return r;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kSchema, std::string("bad quality rating: ") + e.what());
  }
}

std::vector<QualityRating> load_ratings(const std::string& path) {
  std::vector<QualityRating> out;
  for (const auto& j : io::read_jsonl(path)) out.push_back(quality_rating_from_json(j));
  return out;
}

void save_ratings(const std::string& path, const std::vector<QualityRating>& ratings) {
  std::vector<json> docs;
  for (const auto& r : ratings) docs.push_back(to_json(r));
  io::write_jsonl(path, docs);
}

}  // namespace ens::corpus
