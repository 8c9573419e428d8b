#include "ens/core/jsonl.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ens/core/error.hpp"
#include "ens/core/text.hpp"

namespace ens::io {

namespace fs = std::filesystem;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw Error(ErrorCode::kIo, "short write to " + tmp.string());
  }
  fs::rename(tmp, target);
}

void append_line(const std::string& path, const std::string& line) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::kIo, "cannot append to " + path);
  out << line << '\n';
  out.flush();
}

std::vector<nlohmann::json> read_jsonl(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path);
  std::vector<nlohmann::json> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (text::trim(line).empty()) continue;
    try {
      docs.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::kSchema,
                  path + ":" + std::to_string(lineno) + ": malformed JSON: " + e.what());
    }
  }
  return docs;
}

std::string to_jsonl(const std::vector<nlohmann::json>& docs) {
  std::string out;
  for (const auto& d : docs) {
    out += d.dump();
    out += '\n';
  }
  return out;
}

void write_jsonl(const std::string& path, const std::vector<nlohmann::json>& docs) {
  write_file_atomic(path, to_jsonl(docs));
}

}  // namespace ens::io
