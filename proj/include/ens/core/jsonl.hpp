#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace ens::io {

std::string read_file(const std::string& path);

// Writes via a temporary sibling file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

void append_line(const std::string& path, const std::string& line);

// One JSON document per non-blank line. Throws Error(kSchema) naming the
// offending line on malformed input and Error(kIo) when unreadable.
std::vector<nlohmann::json> read_jsonl(const std::string& path);

std::string to_jsonl(const std::vector<nlohmann::json>& docs);

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& docs);

}  // namespace ens::io
