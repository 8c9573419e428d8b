#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "ens/core/dialogue.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/model/mock_backend.hpp"
#include "ens/training/config.hpp"
#include "ens/training/desk_script.hpp"
#include "ens/training/records.hpp"

namespace ens::testing {

inline std::string sample_path(const std::string& file) { return std::string(ENS_SAMPLE_DIR) + "/" + file; }

inline const std::vector<Dialogue>& sample_corpus() {
  static const auto corpus = load_dialogues(sample_path("dialogues.jsonl"));
  return corpus;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("ens-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string str() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

// First `count` labeled records of the sample corpus.
inline std::vector<training::LabeledRecord> sample_labeled(std::size_t count, std::size_t skip_dialogues = 0) {
  std::vector<Dialogue> ds(sample_corpus().begin() + static_cast<long>(skip_dialogues), sample_corpus().end());
  auto all = training::labeled_records(ds);
  all.resize(std::min(count, all.size()));
  return all;
}

inline std::vector<training::UnlabeledRecord> sample_unlabeled(std::size_t count, std::size_t skip_dialogues) {
  std::vector<Dialogue> ds(sample_corpus().begin() + static_cast<long>(skip_dialogues), sample_corpus().end());
  auto all = training::unlabeled_records(ds);
  all.resize(std::min(count, all.size()));
  return all;
}

inline model::BackendFactory desk_factory(const std::vector<training::LabeledRecord>& labeled,
                                          const std::vector<training::UnlabeledRecord>& unlabeled,
                                          AblationMask mask = AblationMask::full(), std::uint64_t seed = 0) {
  model::MockBackendConfig cfg;
  cfg.script = std::make_shared<model::ScriptTable>(training::build_desk_script(labeled, unlabeled, mask, seed));
  return model::mock_factory(cfg);
}

// Small, fast loop settings for desk runs.
inline training::TrainingConfig desk_config() {
  training::TrainingConfig c;
  c.sft_epochs = 1;
  c.dpo_epochs = 1;
  return c;
}

// Every regular file under `root`, keyed by relative path, with contents.
inline std::map<std::string, std::string> tree_contents(const std::filesystem::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) out[std::filesystem::relative(e.path(), root).string()] = io::read_file(e.path().string());
  }
  return out;
}

}  // namespace ens::testing
