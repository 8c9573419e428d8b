#pragma once

#include <string>
#include <vector>

#include "ens/core/dialogue.hpp"
#include "ens/core/error.hpp"
#include "ens/core/result.hpp"
#include "ens/corpus/chat_client.hpp"
#include "ens/corpus/prompts.hpp"
#include "ens/corpus/scenarios.hpp"

namespace ens::corpus {

struct SynthesisDecoding {
  double temperature = 0.9;
  double top_p = 0.95;
};

// Parse failure of a generated transcript; keeps the raw completion.
class SynthesisError : public Error {
 public:
  SynthesisError(ErrorCode code, const std::string& message, std::string raw)
      : Error(code, message), raw_(std::move(raw)) {}
  const std::string& raw() const { return raw_; }

 private:
  std::string raw_;
};

// Parses "User: ..." lines, rationale lines and "Agent: ..." lines into
// turns. Each agent block must carry every component in `mask`. The user
// emotion comes from the following rationale's EM.
Result<std::vector<Turn>> parse_transcript(std::string_view transcript,
                                           AblationMask mask = AblationMask::full());

struct SynthesisResult {
  Dialogue dialogue;
  std::string raw;
  SynthesisDecoding decoding;
};

// Instantiates the synthesis template with the scenario and exemplars,
// queries the client and parses the transcript. Throws SynthesisError
// (kParse, naming the component) or propagates client errors.
SynthesisResult synthesize_dialogue(const Scenario& scenario, const std::vector<Dialogue>& exemplars,
                                    const PromptTemplate& tmpl, ChatClient& client,
                                    const SynthesisDecoding& decoding, const std::string& dialogue_id,
                                    std::uint64_t seed = 0);

struct SynthesisFailure {
  std::string scenario_id;
  std::string message;
  std::string raw;
};

struct CorpusSynthesis {
  std::vector<Dialogue> dialogues;  // each passes validate_dialogue
  std::vector<SynthesisFailure> failures;
};

// One dialogue per scenario, `parallelism` requests in flight, three
// exemplars resampled per request. Results are in scenario order.
CorpusSynthesis synthesize_corpus(const std::vector<Scenario>& scenarios,
                                  const std::vector<Dialogue>& exemplars,
                                  const PromptTemplate& tmpl, ChatClient& client,
                                  const SynthesisDecoding& decoding, std::uint64_t seed,
                                  std::size_t parallelism = 1);

}  // namespace ens::corpus
