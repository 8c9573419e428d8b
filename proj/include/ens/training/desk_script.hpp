#pragma once

#include <cstdint>
#include <vector>

#include "ens/model/mock_backend.hpp"
#include "ens/training/records.hpp"

namespace ens::training {

// Scripted candidate completions for the mock backend. Every context gets a
// spread of candidates: a labeled rationale with the ground-truth response,
// a perturbed response, a foreign response, a generic reply, an unparseable
// line, and a half-and-half blend. Unknown prompts fall back to valid
// labeled completions. Requires at least one labeled record.
model::ScriptTable build_desk_script(const std::vector<LabeledRecord>& labeled,
                                     const std::vector<UnlabeledRecord>& unlabeled,
                                     AblationMask mask, std::uint64_t seed);

}  // namespace ens::training
