#include <doctest.h>

#include <filesystem>
#include <sstream>

#include "../../tools/app.hpp"
#include "fixtures.hpp"

using namespace ens;

namespace {

struct Invocation {
  int code;
  std::string out;
  std::string err;
};

Invocation ens_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ens");
  std::ostringstream out, err;
  const auto r = app::run(args, out, err);
  return {r.exit_code, out.str(), err.str()};
}

const std::string kConfig = std::string(ENS_SOURCE_DIR) + "/ens.config.example";

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("usage errors exit 1") {
    CHECK(ens_cli({}).code == 1);
    CHECK(ens_cli({"frobnicate"}).code == 1);
    CHECK(ens_cli({"--help"}).code == 0);
    testing::TempDir dir("cli-gen");
    const auto r = ens_cli({"generate", "--seeds", testing::sample_path("dialogues.jsonl"), "--out", dir.str(), "--n", "0"});
    CHECK(r.code == 1);
    CHECK(ens_cli({"generate", "--seeds", testing::sample_path("dialogues.jsonl"), "--out", dir.str(), "--n", "2",
                   "--domain", "space_travel"})
              .code == 1);
  }

  TEST_CASE("validate reports statistics and violations") {
    const auto ok = ens_cli({"validate", "--corpus", testing::sample_path("dialogues.jsonl")});
    CHECK(ok.code == 0);
    CHECK(ok.out.find("violations: 0") != std::string::npos);
    testing::TempDir dir("cli-val");
    auto d = testing::sample_corpus()[0];
    d.turns[1].rationale->strategy.reset();
    io::write_file_atomic((dir.path() / "bad.jsonl").string(), to_json(d).dump() + "\n");
    const auto bad = ens_cli({"validate", "--corpus", (dir.path() / "bad.jsonl").string()});
    CHECK(bad.code == 1);
    CHECK(bad.out.find("violations: 1") != std::string::npos);
    CHECK(ens_cli({"validate", "--corpus", (dir.path() / "absent.jsonl").string()}).code == 1);
    const auto split = ens_cli({"validate", "--corpus", testing::sample_path("dialogues.jsonl"), "--ratings",
                                testing::sample_path("ratings.jsonl"), "--split-out", dir.str()});
    CHECK(split.code == 0);
  }

  TEST_CASE("train, evaluate and refuse to overwrite a run") {
    testing::TempDir dir("cli-train");
    const auto runs = dir.str();
    const auto corpus = testing::sample_path("dialogues.jsonl");
    std::vector<std::string> train{"train",    "--labeled", corpus,    "--unlabeled",
                                   corpus,     "--run-id",  "r1",      "--runs-dir",
                                   runs,       "--config",  kConfig,   "--set",
                                   "loop.iteration_limit=1"};
    const auto t = ens_cli(train);
    REQUIRE_MESSAGE(t.code == 0, t.err);
    CHECK(std::filesystem::exists(dir.path() / "r1" / "state.json"));
    CHECK(std::filesystem::exists(dir.path() / "r1" / "checkpoints" / "sft-1"));
    CHECK(ens_cli(train).code == 1);

    const auto md = ens_cli({"evaluate", "--run-id", "r1", "--corpus", corpus, "--runs-dir", runs});
    REQUIRE_MESSAGE(md.code == 0, md.err);
    CHECK(md.out.find("| PPL |") != std::string::npos);
    const auto js = ens_cli({"evaluate", "--run-id", "r1", "--corpus", corpus, "--runs-dir", runs, "--format", "json"});
    CHECK(js.code == 0);
    CHECK_NOTHROW(nlohmann::json::parse(js.out));
    CHECK(ens_cli({"evaluate", "--run-id", "nope", "--corpus", corpus, "--runs-dir", runs}).code == 1);
  }

  TEST_CASE("configuration errors exit 1 and external backends exit 2") {
    testing::TempDir dir("cli-cfg");
    const auto corpus = testing::sample_path("dialogues.jsonl");
    io::write_file_atomic((dir.path() / "partial.config").string(), "thresholds.tau1 = 0.8\n");
    const auto partial = ens_cli({"train", "--labeled", corpus, "--unlabeled", corpus, "--run-id", "a", "--runs-dir",
                                  dir.str(), "--config", (dir.path() / "partial.config").string()});
    CHECK(partial.code == 1);
    CHECK(partial.err.find("thresholds.tau2") != std::string::npos);
    const auto ext = ens_cli({"train", "--labeled", corpus, "--unlabeled", corpus, "--run-id", "b", "--runs-dir",
                              dir.str(), "--config", kConfig, "--set", "backend.kind=external"});
    CHECK(ext.code == 2);
    CHECK(ens_cli({"ablate", "--mask", "7", "--labeled", corpus, "--unlabeled", corpus, "--corpus", corpus,
                   "--runs-dir", dir.str(), "--config", kConfig})
              .code == 1);
  }
}
