#pragma once

#include <string>

#include "ens/model/backend.hpp"

namespace ens::model {

// File layout: one JSON line with the provenance, then the raw payload.
void save_checkpoint(const std::string& path, const PolicyCheckpoint& checkpoint);
PolicyCheckpoint load_checkpoint(const std::string& path);

// "<stage>-<iteration>", the file name under runs/<run-id>/checkpoints/.
std::string checkpoint_name(const Provenance& provenance);

// Hex fnv1a of the payload bytes.
std::string payload_digest(const std::string& payload);

}  // namespace ens::model
