#pragma once

#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <string>
#include <vector>

namespace iacforge::repair {

struct RepairTranscript;

struct GenerationParams {
  std::string model;
  double temperature = 0.2;
  int max_tokens = 4096;
};

// Transport failure. When thrown out of a repair loop, `partial` carries the
// transcript of the turns completed before the failure.
struct LlmUnavailable : std::runtime_error {
  std::shared_ptr<RepairTranscript> partial;
  explicit LlmUnavailable(const std::string& reason) : std::runtime_error(reason) {}
};

class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual std::string complete(const std::string& prompt, const GenerationParams& params) = 0;
};

// Plays back a fixed list of responses in order. Deterministic; safe for
// concurrent callers. Exhausting the script raises LlmUnavailable.
class ScriptedMockClient : public LlmClient {
 public:
  explicit ScriptedMockClient(std::vector<std::string> responses);

  std::string complete(const std::string& prompt, const GenerationParams& params) override;

  // Prompts seen so far, in call order.
  std::vector<std::string> prompts() const;
  int calls() const;

 private:
  std::vector<std::string> responses_;
  std::vector<std::string> prompts_;
  std::size_t next_ = 0;
  mutable std::mutex mu_;
};

// Talks to an OpenAI-style chat-completions endpoint. The bearer token is
// read from IACFORGE_LLM_API_KEY when present. Retries 429 and 5xx responses
// with exponential backoff, three attempts in total.
class HttpChatClient : public LlmClient {
 public:
  explicit HttpChatClient(std::string endpoint, std::string default_model = "");

  std::string complete(const std::string& prompt, const GenerationParams& params) override;

 private:
  std::string base_;
  std::string path_;
  std::string default_model_;
};

// Replays responses recorded by RecordingClient: a JSON Lines file of
// {prompt_hash, response} rows, consumed FIFO per prompt hash.
class ReplayLogClient : public LlmClient {
 public:
  explicit ReplayLogClient(const std::string& log_path);

  std::string complete(const std::string& prompt, const GenerationParams& params) override;

 private:
  std::map<std::string, std::deque<std::string>> by_hash_;
  std::mutex mu_;
};

// Forwards to an inner client and appends every exchange to a JSON Lines log
// that ReplayLogClient can play back.
class RecordingClient : public LlmClient {
 public:
  RecordingClient(LlmClient& inner, std::string log_path);

  std::string complete(const std::string& prompt, const GenerationParams& params) override;

 private:
  LlmClient& inner_;
  std::string log_path_;
  std::mutex mu_;
};

}  // namespace iacforge::repair
