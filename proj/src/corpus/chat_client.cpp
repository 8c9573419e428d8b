#include "ens/corpus/chat_client.hpp"

#include <cstdlib>
#include <random>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "ens/core/catalog.hpp"
#include "ens/core/error.hpp"
#include "ens/core/random.hpp"
#include "ens/core/rationale.hpp"
#include "ens/core/tagged.hpp"
#include "ens/core/text.hpp"
#include "ens/corpus/prompts.hpp"

namespace ens::corpus {

MockChatClient::MockChatClient(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

MockChatClient::MockChatClient(std::function<std::string(const ChatRequest&)> respond)
    : respond_(std::move(respond)) {}

std::string MockChatClient::complete(const ChatRequest& request) {
  std::lock_guard lock(mu_);
  requests_.push_back(request);
  if (respond_) return respond_(request);
  if (responses_.empty()) return {};
  return responses_[next_++ % responses_.size()];
}

std::vector<ChatRequest> MockChatClient::requests() const {
  std::lock_guard lock(mu_);
  return requests_;
}

// ---------------------------------------------------------------------------
// Desk client

namespace {

struct DomainBank {
  std::string_view role_user, role_agent, noun;
  std::vector<std::string_view> issues;
  std::vector<std::string_view> openers;
};

const DomainBank& bank(bool jobs) {
  static const DomainBank kJobs{
      "candidate",
      "hiring manager",
      "job offer",
      {"base salary", "remote work days", "start date", "signing bonus", "promotion timeline",
       "training budget", "vacation days"},
      {"I was hoping the base salary would be higher than what you mentioned.",
       "Honestly, the number of remote work days in this offer worries me.",
       "I really like the team, and I am excited about the start date you proposed.",
       "The signing bonus you described seems low for this level of responsibility.",
       "I am not sure the promotion timeline matches what we discussed earlier.",
       "Thank you, the training budget is more generous than I expected."}};
  static const DomainBank kResources{
      "community coordinator",
      "logistics officer",
      "supply plan",
      {"water containers", "food parcels", "medical kits", "generator fuel", "volunteer shifts",
       "tents", "transport slots"},
      {"We need more water containers than your plan allows for our shelter.",
       "I am worried that the medical kits will run out before the weekend.",
       "It is a relief to hear that the food parcels arrived on time.",
       "Your split of the generator fuel leaves our clinic short every night.",
       "Why are our volunteer shifts always the first ones to be cut?",
       "I appreciate that you kept two transport slots open for us."}};
  return jobs ? kJobs : kResources;
}

bool mentions_resources(std::string_view s) {
  for (std::string_view w : {"resource", "supply", "logistics", "shelter"}) {
    if (s.find(w) != std::string_view::npos) return true;
  }
  return false;
}

template <typename T>
const T& pick(const std::vector<T>& v, std::mt19937_64& g) {
  return v[static_cast<std::size_t>(rng::below(g, v.size()))];
}

std::string desk_scenario(const std::string& prompt, std::uint64_t seed) {
  std::mt19937_64 g(text::derive_seed(seed, text::fnv1a(prompt)));
  const bool jobs = !mentions_resources(prompt);
  const auto& b = bank(jobs);
  const auto& a = pick(b.issues, g);
  auto c = pick(b.issues, g);
  while (c == a) c = pick(b.issues, g);
  const int amount = 40 + static_cast<int>(rng::below(g, 60));
  const int limit = 2 + static_cast<int>(rng::below(g, 5));
  return "A " + std::string(b.role_agent) + " and a " + std::string(b.role_user) +
         " negotiate the terms of a " + std::string(b.noun) + ". The main issues are the " +
         std::string(a) + " and the " + std::string(c) + ". The " + std::string(b.role_agent) +
         " can move at most " + std::to_string(limit) + " steps on the " + std::string(a) +
         ", while the " + std::string(b.role_user) + " wants an improvement of about " +
         std::to_string(amount) + " percent. Both sides want an agreement within one meeting.";
}

std::string desk_transcript(const std::string& prompt, std::uint64_t seed) {
  std::mt19937_64 g(text::derive_seed(seed, text::fnv1a(prompt), 0x7a11ULL));
  // The scenario is inlined in the first line of the synthesis prompt.
  const bool jobs = !mentions_resources(prompt.substr(0, prompt.find('\n')));
  const auto& b = bank(jobs);
  const int exchanges = 2 + static_cast<int>(rng::below(g, 2));
  std::string out;
  for (int t = 0; t < exchanges; ++t) {
    const auto emotion = all_emotions()[static_cast<std::size_t>(rng::below(g, kEmotionCount))];
    const auto strategy = all_strategies()[static_cast<std::size_t>(rng::below(g, kStrategyCount))];
    const auto& issue = pick(b.issues, g);
    EnsCotRationale r;
    r.emotion = emotion;
    r.trigger = "the current proposal on the " + std::string(issue) + ".";
    r.assessment = "the " + std::string(b.noun) + " does not yet reflect their needs on the " +
                   std::string(issue) + ".";
    r.perspective_shift = "both sides gain if the " + std::string(issue) +
                          " is settled in a way that keeps the talks moving.";
    r.mindset_transformation = "a fair compromise on the " + std::string(issue) +
                               " is a step forward, not a loss.";
    r.strategy = strategy;
    r.strategy_reason = "address the user's " + std::string(name(emotion)) + " about the " +
                        std::string(issue) + ", the agent uses " +
                        text::to_lower(display_name(strategy)) + ".";
    r.response = std::string(exemplar_utterance(strategy));
    out += "User: " + std::string(pick(b.openers, g)) + "\n";
    out += render_rationale_body(r, AblationMask::full(), "\n") + "\n";
  }
  return out;
}

}  // namespace

std::string DeskChatClient::complete(const ChatRequest& request) {
  if (request.prompt.find(kAdherenceSentence) != std::string::npos) {
    return desk_transcript(request.prompt, request.seed);
  }
  return desk_scenario(request.prompt, request.seed);
}

// ---------------------------------------------------------------------------
// Retries and HTTP

std::string with_retries(const std::function<std::string()>& fn, const RetryPolicy& policy) {
  const int attempts = std::max(1, policy.attempts);
  auto delay = policy.base_delay;
  for (int a = 1;; ++a) {
    try {
      return fn();
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kClient || a >= attempts) throw;
    }
    if (policy.sleep) {
      policy.sleep(delay);
    } else {
      std::this_thread::sleep_for(delay);
    }
    delay *= 2;
  }
}

HttpChatClient::HttpChatClient(std::string endpoint, std::string api_key, std::string model,
                               RetryPolicy retry)
    : endpoint_(std::move(endpoint)),
      api_key_(std::move(api_key)),
      model_(std::move(model)),
      retry_(std::move(retry)) {}

namespace {

// "https://host:port/v1/chat/completions" -> ("https://host:port", "/v1/chat/completions")
std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path == std::string::npos) return {url, "/v1/chat/completions"};
  return {url.substr(0, path), url.substr(path)};
}

}  // namespace

std::string HttpChatClient::complete(const ChatRequest& request) {
  nlohmann::json body = {{"model", model_},
                         {"messages", {{{"role", "user"}, {"content", request.prompt}}}},
                         {"temperature", request.temperature},
                         {"top_p", request.top_p},
                         {"seed", request.seed}};
  const auto [host, path] = split_url(endpoint_);
  const auto payload = body.dump();
  const auto raw = with_retries(
      [&]() -> std::string {
        httplib::Client cli(host);
        cli.set_connection_timeout(30);
        cli.set_read_timeout(300);
        httplib::Headers headers;
        if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
        auto res = cli.Post(path, headers, payload, "application/json");
        if (!res) {
          throw Error(ErrorCode::kClient, "request to " + endpoint_ + " failed: " +
                                              httplib::to_string(res.error()));
        }
        if (res->status == 429 || res->status >= 500) {
          throw Error(ErrorCode::kClient, "endpoint returned HTTP " + std::to_string(res->status));
        }
        if (res->status != 200) {
          throw Error(ErrorCode::kParse, "endpoint returned HTTP " + std::to_string(res->status) +
                                             ": " + res->body);
        }
        return res->body;
      },
      retry_);
  try {
    const auto j = nlohmann::json::parse(raw);
    return j.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("unexpected completion payload: ") + e.what());
  }
}

std::unique_ptr<ChatClient> http_client_from_env() {
  const char* endpoint = std::getenv("ENS_LLM_ENDPOINT");
  if (!endpoint || !*endpoint) throw Error(ErrorCode::kConfig, "ENS_LLM_ENDPOINT is not set");
  const char* key = std::getenv("ENS_LLM_API_KEY");
  const char* model = std::getenv("ENS_LLM_MODEL");
  return std::make_unique<HttpChatClient>(endpoint, key ? key : "",
                                          model && *model ? model : "gpt-3.5-turbo");
}

}  // namespace ens::corpus
