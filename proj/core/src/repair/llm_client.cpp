#include "iacforge/repair/llm_client.hpp"

#include <chrono>
#include <cstdlib>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "iacforge/util/jsonl.hpp"
#include "iacforge/util/sha256.hpp"

namespace iacforge::repair {

ScriptedMockClient::ScriptedMockClient(std::vector<std::string> responses)
    : responses_(std::move(responses)) {}

std::string ScriptedMockClient::complete(const std::string& prompt, const GenerationParams&) {
  std::lock_guard<std::mutex> lock(mu_);
  if (next_ >= responses_.size()) {
    throw LlmUnavailable("mock script exhausted after " + std::to_string(responses_.size()) +
                         " responses");
  }
  prompts_.push_back(prompt);
  return responses_[next_++];
}

std::vector<std::string> ScriptedMockClient::prompts() const {
  std::lock_guard<std::mutex> lock(mu_);
  return prompts_;
}

int ScriptedMockClient::calls() const {
  std::lock_guard<std::mutex> lock(mu_);
  return static_cast<int>(next_);
}

HttpChatClient::HttpChatClient(std::string endpoint, std::string default_model)
    : default_model_(std::move(default_model)) {
  auto scheme_end = endpoint.find("://");
  std::size_t host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  auto path_start = endpoint.find('/', host_start);
  if (path_start == std::string::npos) {
    base_ = endpoint;
    path_ = "/v1/chat/completions";
  } else {
    base_ = endpoint.substr(0, path_start);
    path_ = endpoint.substr(path_start);
  }
}

std::string HttpChatClient::complete(const std::string& prompt, const GenerationParams& params) {
  nlohmann::json body{
      {"model", params.model.empty() ? default_model_ : params.model},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
  };

  httplib::Headers headers;
  if (const char* key = std::getenv("IACFORGE_LLM_API_KEY")) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }

  std::string last_error = "no attempt made";
  for (int attempt = 0; attempt < 3; ++attempt) {
    if (attempt > 0) {
      std::this_thread::sleep_for(std::chrono::milliseconds(500 << (attempt - 1)));
    }
    httplib::Client cli(base_);
    cli.set_read_timeout(120, 0);
    auto res = cli.Post(path_, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection to " + base_ + " failed";
      continue;
    }
    if (res->status == 429 || res->status >= 500) {
      last_error = "endpoint returned status " + std::to_string(res->status);
      continue;
    }
    if (res->status != 200) {
      throw LlmUnavailable("endpoint returned status " + std::to_string(res->status) + ": " +
                           res->body.substr(0, 500));
    }
    try {
      auto j = nlohmann::json::parse(res->body);
      return j.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
      throw LlmUnavailable(std::string("malformed completion response: ") + e.what());
    }
  }
  throw LlmUnavailable("gave up after 3 attempts: " + last_error);
}

ReplayLogClient::ReplayLogClient(const std::string& log_path) {
  for (const auto& row : util::read_jsonl(log_path)) {
    by_hash_[row.at("prompt_hash").get<std::string>()].push_back(
        row.at("response").get<std::string>());
  }
}

std::string ReplayLogClient::complete(const std::string& prompt, const GenerationParams&) {
  std::lock_guard<std::mutex> lock(mu_);
  auto hash = util::sha256_hex(prompt);
  auto it = by_hash_.find(hash);
  if (it == by_hash_.end() || it->second.empty()) {
    throw LlmUnavailable("replay log has no response left for prompt hash " + hash);
  }
  auto response = std::move(it->second.front());
  it->second.pop_front();
  return response;
}

RecordingClient::RecordingClient(LlmClient& inner, std::string log_path)
    : inner_(inner), log_path_(std::move(log_path)) {}

std::string RecordingClient::complete(const std::string& prompt, const GenerationParams& params) {
  auto response = inner_.complete(prompt, params);
  std::lock_guard<std::mutex> lock(mu_);
  util::append_jsonl(log_path_, nlohmann::json{{"prompt_hash", util::sha256_hex(prompt)},
                                               {"response", response}});
  return response;
}

}  // namespace iacforge::repair
