#include "app.hpp"

#include <pthread.h>

#include <csignal>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "ens/core/dialogue.hpp"
#include "ens/core/error.hpp"
#include "ens/core/jsonl.hpp"
#include "ens/corpus/chat_client.hpp"
#include "ens/corpus/prompts.hpp"
#include "ens/corpus/quality.hpp"
#include "ens/corpus/scenarios.hpp"
#include "ens/corpus/split.hpp"
#include "ens/corpus/synthesis.hpp"
#include "ens/eval/report.hpp"
#include "ens/eval/sweep.hpp"
#include "ens/model/checkpoint.hpp"
#include "ens/model/embedder.hpp"
#include "ens/model/mock_backend.hpp"
#include "ens/service/server.hpp"
#include "ens/service/session_store.hpp"
#include "ens/training/config.hpp"
#include "ens/training/desk_script.hpp"
#include "ens/training/loop.hpp"
#include "ens/training/records.hpp"

namespace ens::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Failure carrying the exit code it maps to.
struct Failure {
  int code;
  std::string message;
};

[[noreturn]] void invalid(const std::string& message) { throw Failure{kValidationFailure, message}; }

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kClient:
    case ErrorCode::kBackend:
    case ErrorCode::kIo:
    case ErrorCode::kGenerationUnparseable:
    case ErrorCode::kEmptyGeneration:
      return kRuntimeFailure;
    default:
      return kValidationFailure;
  }
}

struct CommonFlags {
  std::string config_path;
  std::vector<std::string> sets;
  std::string runs_dir = "runs";
};

KeyValueConfig load_config(const CommonFlags& f) {
  KeyValueConfig kv;
  std::string path = f.config_path;
  if (path.empty()) {
    if (const char* env = std::getenv("ENS_CONFIG"); env && *env) {
      path = env;
    } else if (fs::exists("ens.config")) {
      path = "ens.config";
    }
  }
  if (!path.empty()) {
    if (!fs::exists(path)) invalid("config file " + path + " not found");
    kv = KeyValueConfig::load(path);
  }
  for (const auto& s : f.sets) kv.apply_override(s);
  return kv;
}

std::vector<Dialogue> load_corpus(const std::string& path) {
  if (!fs::exists(path)) invalid("corpus " + path + " not found");
  return load_dialogues(path);
}

std::size_t report_violations(const std::vector<Dialogue>& corpus, const std::string& label,
                              std::ostream& err) {
  std::size_t n = 0;
  for (const auto& d : corpus) {
    for (const auto& v : validate_dialogue(d).violations) {
      ++n;
      err << label << ": " << d.id;
      if (v.turn) err << " turn " << *v.turn;
      err << ": " << error_code_name(v.code) << ": " << v.message << "\n";
    }
  }
  return n;
}

std::vector<Dialogue> load_valid_corpus(const std::string& path, std::ostream& err) {
  auto corpus = load_corpus(path);
  if (auto n = report_violations(corpus, path, err); n > 0) {
    invalid(path + ": " + std::to_string(n) + " validation violation(s)");
  }
  return corpus;
}

void require_mock_backend(const KeyValueConfig& kv) {
  const auto kind = kv.get_string("backend.kind", "mock");
  if (kind == "mock") return;
  if (kind == "external") {
    throw Failure{kRuntimeFailure, "backend.kind=external needs an adapter; none is linked into this build"};
  }
  invalid("backend.kind: unknown value \"" + kind + "\"");
}

model::BackendFactory desk_factory(std::shared_ptr<const model::ScriptTable> script) {
  model::MockBackendConfig mc;
  mc.script = std::move(script);
  return model::mock_factory(mc);
}

fs::path run_root(const std::string& runs_dir, const std::string& run_id) {
  if (run_id.empty() || run_id.find('/') != std::string::npos || run_id == "." || run_id == "..") {
    invalid("invalid run id \"" + run_id + "\"");
  }
  return fs::path(runs_dir) / run_id;
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(4) << v;
  return s.str();
}

void print_iterations(const training::TrainingRunState& st, std::ostream& out) {
  out << "| iter | sft | started from | dpo | pairs | pseudo | new | |D_N| | sft loss | dpo loss |\n"
      << "|---|---|---|---|---|---|---|---|---|---|\n";
  for (const auto& it : st.iterations) {
    out << "| " << it.iteration << " | " << it.sft_checkpoint << " | " << it.sft_started_from << " | "
        << it.dpo_checkpoint.value_or("-") << " | " << it.preference_pairs << " | " << it.pseudo_labels
        << " | " << it.new_pseudo_labels << " | " << it.merged << " | " << fmt(it.sft_initial_loss)
        << " -> " << fmt(it.sft_final_loss) << " | ";
    if (it.dpo_initial_loss && it.dpo_final_loss) {
      out << fmt(*it.dpo_initial_loss) << " -> " << fmt(*it.dpo_final_loss);
    } else {
      out << "-";
    }
    out << " |\n";
  }
  out << "status: " << st.status << "\n";
}

struct TrainFlags {
  std::string labeled, unlabeled, run_id;
};

CommandResult train_run(const TrainFlags& f, const CommonFlags& common, const KeyValueConfig& kv,
                        std::ostream& out, std::ostream& err) {
  const auto config = training::training_config_from(kv, /*require_all=*/true);
  require_mock_backend(kv);
  const auto root = run_root(common.runs_dir, f.run_id);
  if (fs::exists(root)) invalid("run " + f.run_id + " already exists at " + root.string() + "; refusing to overwrite");

  const auto labeled = training::labeled_records(load_valid_corpus(f.labeled, err));
  const auto unlabeled = training::unlabeled_records(load_valid_corpus(f.unlabeled, err));
  if (labeled.empty()) invalid(f.labeled + ": no rationale-annotated agent turns");
  if (unlabeled.empty()) invalid(f.unlabeled + ": no agent turns");

  auto script = std::make_shared<model::ScriptTable>(
      training::build_desk_script(labeled, unlabeled, config.mask, config.seed));
  fs::create_directories(root);
  script->save((root / "script.jsonl").string());
  KeyValueConfig recorded = kv;
  recorded.merge(training::to_key_values(config));
  io::write_file_atomic((root / "run.config").string(), recorded.dump());

  model::HashEmbedder embedder;
  training::LoopOptions opts;
  opts.run_id = f.run_id;
  opts.runs_dir = common.runs_dir;
  opts.log = [&err](const std::string& line) { err << line << "\n"; };
  training::TrainingRunState state;
  try {
    state = training::run_iterative_loop(desk_factory(script), embedder, labeled, unlabeled, config, opts);
  } catch (const Error& e) {
    throw Failure{kRuntimeFailure, std::string("training failed (state kept in ") + root.string() + "): " + e.what()};
  }
  print_iterations(state, out);
  CommandResult r;
  r.summary = "run " + f.run_id + ": " + std::to_string(state.iterations.size()) + " iteration(s), " + state.status;
  r.artifacts = {(root / "state.json").string(), (root / "checkpoints").string()};
  return r;
}

struct LoadedRun {
  training::TrainingConfig config;
  training::TrainingRunState summary;
  std::unique_ptr<model::GenerativeBackend> policy;
  std::string checkpoint;
};

LoadedRun load_run(const std::string& runs_dir, const std::string& run_id, const std::string& stage) {
  const auto root = run_root(runs_dir, run_id);
  if (!fs::exists(root / "state.json")) invalid("unknown run id \"" + run_id + "\" under " + runs_dir);
  const auto state = json::parse(io::read_file((root / "state.json").string()));
  KeyValueConfig kv;
  for (const auto& [k, v] : state.at("config").items()) kv.set(k, v.get<std::string>());
  LoadedRun run;
  run.config = training::training_config_from(kv, false);
  const auto& iterations = state.at("iterations");
  if (iterations.empty()) invalid("run " + run_id + " has no completed iteration");
  const auto& last = iterations.back();
  if (stage == "sft") {
    run.checkpoint = last.at("sft_checkpoint").get<std::string>();
  } else if (stage == "dpo") {
    for (const auto& it : iterations) {
      if (!it.at("dpo_checkpoint").is_null()) run.checkpoint = it.at("dpo_checkpoint").get<std::string>();
    }
    if (run.checkpoint.empty()) invalid("run " + run_id + " has no dpo checkpoint");
  } else {
    invalid("unknown stage \"" + stage + "\" (sft|dpo)");
  }
  const auto ck_path = root / "checkpoints" / run.checkpoint;
  if (!fs::exists(ck_path)) invalid("missing checkpoint " + ck_path.string());
  if (!fs::exists(root / "script.jsonl")) invalid("missing " + (root / "script.jsonl").string());
  auto script = std::make_shared<model::ScriptTable>(model::ScriptTable::load((root / "script.jsonl").string()));
  run.policy = desk_factory(script)();
  run.policy->restore(model::load_checkpoint(ck_path.string()));
  run.summary.run_id = run_id;
  run.summary.status = state.at("status").get<std::string>();
  return run;
}

eval::MetricReport evaluate_run(const std::string& runs_dir, const std::string& run_id,
                                const std::string& corpus_path, const std::string& stage,
                                std::ostream& err) {
  auto run = load_run(runs_dir, run_id, stage);
  const auto test = training::labeled_records(load_valid_corpus(corpus_path, err));
  if (test.empty()) invalid(corpus_path + ": no rationale-annotated agent turns");
  model::HashEmbedder embedder;
  eval::EvalOptions opts;
  opts.decoding.seed = run.config.seed;
  opts.mask = run.config.mask;
  opts.corpus_id = fs::path(corpus_path).stem().string();
  opts.policy_id = run_id + "/" + run.checkpoint;
  auto report = eval::evaluate_policy(*run.policy, embedder, test, opts);
  report.tau1 = run.config.tau1;
  report.tau2 = run.config.tau2;
  report.tau3 = run.config.tau3;
  return report;
}

void emit_report(const eval::MetricReport& r, const std::string& format, std::ostream& out) {
  if (format == "md") {
    out << eval::emit_markdown({r});
  } else if (format == "json") {
    out << eval::emit_json({r}) << "\n";
  } else {
    out << eval::sweep_csv({r});
  }
}

void check_format(const std::string& format) {
  if (format != "md" && format != "json" && format != "csv") invalid("--format must be md, json or csv");
}

std::unique_ptr<corpus::ChatClient> make_client(const std::string& kind) {
  if (kind == "mock") return std::make_unique<corpus::DeskChatClient>();
  if (kind == "http") return corpus::http_client_from_env();
  invalid("--client must be mock or http");
}

// Blocks SIGINT/SIGTERM for the process threads and stops `server` when one
// arrives.
class SignalStopper {
 public:
  explicit SignalStopper(service::NegotiationServer& server) {
    sigemptyset(&set_);
    sigaddset(&set_, SIGINT);
    sigaddset(&set_, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &set_, &previous_);
    waiter_ = std::thread([this, &server] {
      int sig = 0;
      sigwait(&set_, &sig);
      server.stop();
    });
  }
  ~SignalStopper() {
    pthread_kill(waiter_.native_handle(), SIGTERM);
    waiter_.join();
    pthread_sigmask(SIG_SETMASK, &previous_, nullptr);
  }

 private:
  sigset_t set_{};
  sigset_t previous_{};
  std::thread waiter_;
};

}  // namespace

CommandResult run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App cli{"Emotion-aware negotiation pipeline"};
  cli.require_subcommand(1);
  CommonFlags common;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", common.config_path, "Config file (else $ENS_CONFIG, else ./ens.config)");
    sub->add_option("--set", common.sets, "Override a config key (key=value)");
    sub->add_option("--runs-dir", common.runs_dir, "Root of run directories")->capture_default_str();
  };

  // generate
  std::string seeds_path, out_dir, domain = "other", client_kind = "mock";
  long long n = -1, expand = 0;
  std::uint64_t gen_seed = 0;
  std::size_t parallelism = 1;
  auto* gen = cli.add_subcommand("generate", "Synthesize scenarios and dialogues from seed dialogues");
  gen->add_option("--seeds", seeds_path, "Seed dialogues (JSONL)")->required();
  gen->add_option("--out", out_dir, "Output directory")->required();
  gen->add_option("--n", n, "Scenarios to generate")->required();
  gen->add_option("--domain", domain, "Domain tag")->capture_default_str();
  gen->add_option("--client", client_kind, "mock or http")->capture_default_str();
  gen->add_option("--expand", expand, "Extra expansion requests");
  gen->add_option("--seed", gen_seed, "Sampling seed");
  gen->add_option("--parallelism", parallelism, "Requests in flight");

  // validate
  std::string corpus_path, ratings_path, filtered_out, split_out;
  double threshold = 3.0;
  std::vector<double> ratios{0.6, 0.2, 0.2};
  std::uint64_t split_seed = 0;
  auto* val = cli.add_subcommand("validate", "Validate a corpus and print statistics");
  val->add_option("--corpus", corpus_path, "Dialogues (JSONL)")->required();
  val->add_option("--ratings", ratings_path, "Quality ratings (JSONL) for filtering");
  val->add_option("--threshold", threshold, "Minimum mean per criterion")->capture_default_str();
  val->add_option("--filtered-out", filtered_out, "Write retained dialogues here");
  val->add_option("--split-out", split_out, "Write train/dev/test splits to this directory");
  val->add_option("--ratios", ratios, "Split ratios")->expected(3)->delimiter(',');
  val->add_option("--split-seed", split_seed, "Split shuffle seed");

  // train
  TrainFlags tf;
  auto* train = cli.add_subcommand("train", "Run the iterative training loop");
  train->add_option("--labeled", tf.labeled, "Rationale-annotated dialogues")->required();
  train->add_option("--unlabeled", tf.unlabeled, "Dialogues without rationales")->required();
  train->add_option("--run-id", tf.run_id, "Run identifier")->required();
  add_common(train);

  // evaluate
  std::string eval_run, format = "md", stage = "sft";
  auto* evaluate = cli.add_subcommand("evaluate", "Evaluate a trained run on a corpus");
  evaluate->add_option("--run-id", eval_run, "Run identifier")->required();
  evaluate->add_option("--corpus", corpus_path, "Test dialogues")->required();
  evaluate->add_option("--format", format, "md, json or csv")->capture_default_str();
  evaluate->add_option("--stage", stage, "Checkpoint stage (sft|dpo)")->capture_default_str();
  add_common(evaluate);

  // ablate
  std::string mask_id;
  TrainFlags af;
  auto* ablate = cli.add_subcommand("ablate", "Train and evaluate under a rationale mask setting");
  ablate->add_option("--mask", mask_id, "Mask setting 0..5")->required();
  ablate->add_option("--labeled", af.labeled, "Rationale-annotated dialogues")->required();
  ablate->add_option("--unlabeled", af.unlabeled, "Dialogues without rationales")->required();
  ablate->add_option("--corpus", corpus_path, "Test dialogues")->required();
  ablate->add_option("--run-id", af.run_id, "Run identifier (default ablation-<mask>)");
  ablate->add_option("--format", format, "md, json or csv")->capture_default_str();
  add_common(ablate);

  // sweep
  std::string sweep_out;
  TrainFlags sf;
  auto* sweep = cli.add_subcommand("sweep", "Threshold sensitivity grid");
  sweep->add_option("--labeled", sf.labeled, "Rationale-annotated dialogues")->required();
  sweep->add_option("--unlabeled", sf.unlabeled, "Dialogues without rationales")->required();
  sweep->add_option("--corpus", corpus_path, "Test dialogues")->required();
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");
  add_common(sweep);

  // serve
  std::vector<std::string> serve_runs;
  std::string scenarios_path, sessions_dir = "sessions", addr, token, desk_labeled;
  auto* serve = cli.add_subcommand("serve", "Run the HTTP session service");
  serve->add_option("--run-id", serve_runs, "Serve this run's final policy under its run id");
  serve->add_option("--labeled", desk_labeled, "Serve an untrained scripted policy \"mock\" built from this corpus");
  serve->add_option("--scenarios", scenarios_path, "Scenarios (JSONL)")->required();
  serve->add_option("--sessions-dir", sessions_dir, "Event log directory")->capture_default_str();
  serve->add_option("--addr", addr, "host:port (default $ENS_SERVICE_ADDR or 127.0.0.1:8080)");
  serve->add_option("--token", token, "Bearer token (default $ENS_SERVICE_TOKEN)");
  add_common(serve);

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    cli.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    std::ostringstream o, er;
    const int code = cli.exit(e, o, er);
    out << o.str();
    err << er.str();
    return CommandResult{code == 0 ? kOk : kValidationFailure, e.what(), {}};
  }

  CommandResult result;
  try {
    if (*gen) {
      if (n < 1) invalid("--n must be at least 1\n" + gen->help());
      if (!corpus::is_known_domain(domain)) invalid("unknown --domain \"" + domain + "\"");
      const auto seeds = load_valid_corpus(seeds_path, err);
      if (seeds.empty()) invalid(seeds_path + ": no seed dialogues");
      auto client = make_client(client_kind);
      corpus::GenerationStats stats;
      auto scenarios = corpus::generate_scenarios(seeds, corpus::builtin_template("scenario_generation"),
                                                  *client, static_cast<std::size_t>(n), gen_seed, &stats);
      if (expand > 0) {
        std::vector<corpus::ScenarioExemplar> exemplars;
        for (const auto& d : seeds) {
          exemplars.push_back({corpus::Scenario{"seed-" + d.id, d.scenario, d.domain_tag, "seeded"}, d});
        }
        if (exemplars.size() >= 3) {
          auto more = corpus::expand_scenarios(exemplars, scenarios, corpus::builtin_template("scenario_expansion"),
                                               *client, static_cast<std::size_t>(expand), gen_seed, &stats);
          scenarios.insert(scenarios.end(), more.begin(), more.end());
        } else {
          err << "expansion skipped: needs at least 3 seed dialogues\n";
        }
      }
      for (auto& s : scenarios) s.domain_tag = domain;
      const auto synth = corpus::synthesize_corpus(scenarios, seeds, corpus::builtin_template("dialogue_synthesis"),
                                                   *client, {}, gen_seed, parallelism);
      fs::create_directories(out_dir);
      const auto scen_path = (fs::path(out_dir) / "scenarios.jsonl").string();
      const auto dlg_path = (fs::path(out_dir) / "dialogues.jsonl").string();
      const auto fail_path = (fs::path(out_dir) / "failures.jsonl").string();
      corpus::save_scenarios(scen_path, scenarios);
      save_dialogues(dlg_path, synth.dialogues);
      std::vector<json> failures;
      for (const auto& f : synth.failures) {
        failures.push_back({{"scenario_id", f.scenario_id}, {"message", f.message}, {"raw", f.raw}});
      }
      io::write_jsonl(fail_path, failures);
      const auto violations = report_violations(synth.dialogues, dlg_path, err);
      out << "scenarios: " << scenarios.size() << " (requests " << stats.requests << ", empty " << stats.empty
          << ", duplicates " << stats.duplicates << ", inadequate " << stats.inadequate << ")\n"
          << "dialogues: " << synth.dialogues.size() << " valid, " << synth.failures.size()
          << " unparseable, " << violations << " violation(s)\n";
      result.summary = "generated " + std::to_string(synth.dialogues.size()) + " dialogue(s)";
      result.artifacts = {scen_path, dlg_path, fail_path};
      if (synth.dialogues.empty() && !scenarios.empty()) {
        throw Failure{kRuntimeFailure, "no transcript could be parsed"};
      }
    } else if (*val) {
      const auto corpus = load_corpus(corpus_path);
      const auto violations = report_violations(corpus, corpus_path, err);
      std::vector<corpus::CorpusStats> stats{corpus::corpus_stats("all", corpus)};
      std::vector<Dialogue> kept = corpus;
      if (!ratings_path.empty()) {
        const auto filtered = corpus::filter_corpus(corpus, corpus::load_ratings(ratings_path), threshold);
        kept = filtered.retained;
        out << "quality filter: kept " << filtered.retained.size() << " of " << corpus.size() << "\n";
        stats.push_back(corpus::corpus_stats("retained", kept));
        if (!filtered_out.empty()) {
          save_dialogues(filtered_out, kept);
          result.artifacts.push_back(filtered_out);
        }
      }
      if (!split_out.empty()) {
        const auto splits = corpus::split_corpus(kept, {ratios[0], ratios[1], ratios[2]}, split_seed);
        fs::create_directories(split_out);
        for (const auto& [name, part] : {std::pair{"train", &splits.train}, std::pair{"dev", &splits.dev},
                                         std::pair{"test", &splits.test}}) {
          const auto p = (fs::path(split_out) / (std::string(name) + ".jsonl")).string();
          save_dialogues(p, *part);
          result.artifacts.push_back(p);
          stats.push_back(corpus::corpus_stats(name, *part));
        }
      }
      out << corpus::format_stats(stats);
      out << "violations: " << violations << "\n";
      result.summary = corpus_path + ": " + std::to_string(violations) + " violation(s)";
      if (violations > 0) result.exit_code = kValidationFailure;
    } else if (*train) {
      result = train_run(tf, common, load_config(common), out, err);
    } else if (*evaluate) {
      check_format(format);
      const auto report = evaluate_run(common.runs_dir, eval_run, corpus_path, stage, err);
      emit_report(report, format, out);
      result.summary = "evaluated " + report.policy_id + " on " + std::to_string(report.samples) + " record(s)";
    } else if (*ablate) {
      check_format(format);
      int id = -1;
      try {
        std::size_t used = 0;
        id = std::stoi(mask_id, &used);
        if (used != mask_id.size()) id = -1;
      } catch (const std::exception&) {
      }
      const auto mask = AblationMask::setting(id);
      if (!mask) invalid("unknown mask setting \"" + mask_id + "\" (expected 0..5)");
      auto kv = load_config(common);
      kv.set("ablation.mask", std::to_string(id));
      if (af.run_id.empty()) af.run_id = "ablation-" + std::to_string(id);
      auto trained = train_run(af, common, kv, out, err);
      auto report = evaluate_run(common.runs_dir, af.run_id, corpus_path, "sft", err);
      report.policy_id = "mask " + std::to_string(id) + " (" + mask->to_string() + ")";
      emit_report(report, format, out);
      result.summary = "ablation " + std::to_string(id) + ": " + trained.summary;
      result.artifacts = trained.artifacts;
    } else if (*sweep) {
      const auto kv = load_config(common);
      const auto base = training::training_config_from(kv, true);
      require_mock_backend(kv);
      eval::PipelineInputs in;
      in.labeled = training::labeled_records(load_valid_corpus(sf.labeled, err));
      in.unlabeled = training::unlabeled_records(load_valid_corpus(sf.unlabeled, err));
      in.test = training::labeled_records(load_valid_corpus(corpus_path, err));
      if (in.labeled.empty() || in.unlabeled.empty() || in.test.empty()) invalid("sweep needs non-empty corpora");
      in.factory = desk_factory(std::make_shared<model::ScriptTable>(
          training::build_desk_script(in.labeled, in.unlabeled, base.mask, base.seed)));
      model::HashEmbedder embedder;
      in.embedder = &embedder;
      in.eval.corpus_id = fs::path(corpus_path).stem().string();
      const auto rows = eval::threshold_sensitivity_sweep(eval::make_pipeline_runner(std::move(in)), base,
                                                          eval::default_grid());
      const auto csv = eval::sweep_csv(rows);
      if (sweep_out.empty()) {
        out << csv;
      } else {
        io::write_file_atomic(sweep_out, csv);
        result.artifacts.push_back(sweep_out);
      }
      std::size_t failed = 0;
      for (const auto& r : rows) {
        if (!r.error.empty()) {
          ++failed;
          err << "tau1=" << *r.tau1 << " tau2=" << *r.tau2 << ": " << r.error << "\n";
        }
      }
      result.summary = "sweep: " + std::to_string(rows.size()) + " row(s), " + std::to_string(failed) + " failed";
      if (failed > 0) result.exit_code = kRuntimeFailure;
    } else if (*serve) {
      const auto kv = load_config(common);
      const auto config = training::training_config_from(kv, false);
      training::AgentOptions agent;
      agent.decoding = {config.sample_temperature, config.sample_top_p, config.seed};
      agent.retry_limit = config.generation_retry_limit;
      agent.mask = AblationMask::full();
      service::SessionStore store(sessions_dir, agent);
      for (const auto& s : corpus::load_scenarios(scenarios_path)) store.add_scenario(s);
      for (const auto& id : serve_runs) {
        auto run = load_run(common.runs_dir, id, "sft");
        store.add_policy(id, std::shared_ptr<const model::GenerativeBackend>(std::move(run.policy)));
      }
      if (!desk_labeled.empty()) {
        const auto labeled = training::labeled_records(load_valid_corpus(desk_labeled, err));
        if (labeled.empty()) invalid(desk_labeled + ": no rationale-annotated agent turns");
        auto script = std::make_shared<model::ScriptTable>(
            training::build_desk_script(labeled, {}, AblationMask::full(), config.seed));
        store.add_policy("mock", std::shared_ptr<const model::GenerativeBackend>(desk_factory(script)()));
      }
      if (serve_runs.empty() && desk_labeled.empty()) invalid("serve needs --run-id or --labeled");
      if (token.empty()) {
        if (const char* t = std::getenv("ENS_SERVICE_TOKEN")) token = t;
      }
      const auto address = addr.empty() ? service::listen_address_from_env() : service::parse_listen_address(addr);
      service::NegotiationServer server(store, token.empty() ? std::nullopt : std::optional(token));
      bool ok = false;
      {
        SignalStopper stopper(server);
        err << "listening on " << address.host << ":" << address.port << "\n" << std::flush;
        ok = server.listen(address);
      }
      if (!ok) throw Failure{kRuntimeFailure, "cannot listen on " + address.host + ":" + std::to_string(address.port)};
      result.summary = "service stopped";
      result.artifacts.push_back(sessions_dir);
    }
  } catch (const Failure& f) {
    err << "error: " << f.message << "\n";
    result.exit_code = f.code;
    result.summary = f.message;
  } catch (const Error& e) {
    err << "error: " << error_code_name(e.code()) << ": " << e.what() << "\n";
    result.exit_code = exit_code_for(e.code());
    result.summary = e.what();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    result.exit_code = kRuntimeFailure;
    result.summary = e.what();
  }
  if (result.exit_code == kOk && !result.summary.empty()) err << result.summary << "\n";
  return result;
}

}  // namespace ens::app
