#include "ens/training/agent.hpp"

#include "ens/core/error.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"
#include "ens/training/records.hpp"

namespace ens::training {

AgentTurn generate_agent_turn(const model::GenerativeBackend& policy,
                              const std::vector<Turn>& context, const AgentOptions& options) {
  if (context.empty() || context.back().speaker != Speaker::kUser) {
    throw Error(ErrorCode::kTurnOrder, "agent turn needs a context ending with a user turn");
  }
  const auto prompt = render_prompt(context);
  std::string last_error;
  for (int attempt = 0; attempt <= options.retry_limit; ++attempt) {
    model::Decoding dec = options.decoding;
    dec.seed = text::derive_seed(options.decoding.seed, static_cast<std::uint64_t>(attempt));
    const auto samples = policy.sample(prompt, dec, 1);
    const std::string raw = samples.empty() ? std::string() : samples.front();
    auto parsed = parse_tagged_target(raw, options.mask);
    if (!parsed) {
      last_error = parsed.error().describe();
      continue;
    }
    AgentTurn turn;
    turn.rationale = parsed.value().rationale;
    turn.response = parsed.value().response;
    if (turn.rationale.strategy) turn.selected_strategy = std::string(name(*turn.rationale.strategy));
    turn.completion = raw;
    turn.attempts = attempt + 1;
    return turn;
  }
  throw Error(ErrorCode::kGenerationUnparseable,
              "no parseable completion after " + std::to_string(options.retry_limit + 1) +
                  " attempts: " + last_error);
}

}  // namespace ens::training
