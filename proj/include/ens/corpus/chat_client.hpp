#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace ens::corpus {

struct ChatRequest {
  std::string prompt;
  double temperature = 0.9;
  double top_p = 0.95;
  std::uint64_t seed = 0;
};

// Chat-completion capability. Implementations throw Error(kClient) on
// transport failures and return the raw completion text otherwise.
class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string complete(const ChatRequest& request) = 0;
};

// Replays canned completions in order, cycling; records every request.
class MockChatClient final : public ChatClient {
 public:
  explicit MockChatClient(std::vector<std::string> responses);
  explicit MockChatClient(std::function<std::string(const ChatRequest&)> respond);

  std::string complete(const ChatRequest& request) override;

  std::vector<ChatRequest> requests() const;

 private:
  mutable std::mutex mu_;
  std::vector<std::string> responses_;
  std::function<std::string(const ChatRequest&)> respond_;
  std::size_t next_ = 0;
  std::vector<ChatRequest> requests_;
};

// Offline generator for desk runs: answers scenario prompts with a composed
// scenario summary and synthesis prompts with a well-formed tagged
// transcript, both derived from the request seed and prompt text.
class DeskChatClient final : public ChatClient {
 public:
  std::string complete(const ChatRequest& request) override;
};

using Sleeper = std::function<void(std::chrono::milliseconds)>;

struct RetryPolicy {
  int attempts = 3;
  std::chrono::milliseconds base_delay{250};
  Sleeper sleep;  // defaults to std::this_thread::sleep_for
};

// Calls `fn` until it succeeds, retrying Error(kClient) with exponential
// backoff (base, 2*base, ...). Other errors propagate immediately.
std::string with_retries(const std::function<std::string()>& fn, const RetryPolicy& policy);

// OpenAI-compatible chat/completions endpoint.
class HttpChatClient final : public ChatClient {
 public:
  HttpChatClient(std::string endpoint, std::string api_key, std::string model,
                 RetryPolicy retry = {});

  std::string complete(const ChatRequest& request) override;

 private:
  std::string endpoint_;
  std::string api_key_;
  std::string model_;
  RetryPolicy retry_;
};

// From ENS_LLM_ENDPOINT, ENS_LLM_API_KEY and optional ENS_LLM_MODEL.
// Throws Error(kConfig) when the endpoint is unset.
std::unique_ptr<ChatClient> http_client_from_env();

}  // namespace ens::corpus
