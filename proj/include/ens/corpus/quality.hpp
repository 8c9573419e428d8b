#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "ens/core/dialogue.hpp"

namespace ens::corpus {

// EI, SA, IN, F, C, N, I.
inline constexpr std::array<std::string_view, 7> kQualityCriteria = {"EI", "SA", "IN", "F",
                                                                      "C",  "N",  "I"};

struct QualityRating {
  std::string dialogue_id;
  std::string rater_id;
  std::map<std::string, int> scores;

  bool operator==(const QualityRating&) const = default;
};

// Throws Error(kSchema) unless all seven criteria are present and in [1,5].
void validate_rating(const QualityRating& rating);

struct RetentionDecision {
  std::string dialogue_id;
  bool retained = false;
  std::map<std::string, double> means;
  std::string reason;  // first criterion below threshold, if any
};

struct FilterResult {
  std::vector<Dialogue> retained;
  std::vector<RetentionDecision> decisions;  // one per input dialogue
};

// Retains a dialogue iff every criterion's mean over its raters is >=
// threshold. Throws MissingRating for a dialogue without ratings. Retained
// dialogues get the criterion means as quality_ratings.
FilterResult filter_corpus(const std::vector<Dialogue>& dialogues,
                           const std::vector<QualityRating>& ratings, double threshold = 3.0);

nlohmann::json to_json(const QualityRating& rating);
QualityRating quality_rating_from_json(const nlohmann::json& j);
std::vector<QualityRating> load_ratings(const std::string& path);
void save_ratings(const std::string& path, const std::vector<QualityRating>& ratings);

}  // namespace ens::corpus
