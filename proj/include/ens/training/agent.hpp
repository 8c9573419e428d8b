#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ens/core/dialogue.hpp"
#include "ens/model/backend.hpp"

namespace ens::training {

struct AgentTurn {
  EnsCotRationale rationale;
  std::string response;  // the answer span
  std::string selected_strategy;
  std::string completion;  // raw tagged text
  int attempts = 0;
};

struct AgentOptions {
  model::Decoding decoding;
  int retry_limit = 2;  // extra attempts after the first
  AblationMask mask = AblationMask::full();
};

// Samples and parses one tagged completion. Throws TurnOrder when the
// context does not end with a user turn and GenerationUnparseable once
// 1 + retry_limit samples have failed to parse.
AgentTurn generate_agent_turn(const model::GenerativeBackend& policy,
                              const std::vector<Turn>& context, const AgentOptions& options);

}  // namespace ens::training
