#include "iacforge/service/service.hpp"

#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "iacforge/curate/curate.hpp"
#include "iacforge/policy/policy.hpp"
#include "iacforge/reward/reward.hpp"
#include "iacforge/verify/verify.hpp"

namespace iacforge::service {

namespace {

void reply_json(httplib::Response& res, int status, const nlohmann::json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& message) {
  reply_json(res, status, nlohmann::json{{"error", message}});
}

// Body must parse as a JSON object; anything else is the caller's fault.
std::optional<nlohmann::json> parse_body(const httplib::Request& req, httplib::Response& res) {
  try {
    auto j = nlohmann::json::parse(req.body);
    if (!j.is_object()) {
      reply_error(res, 400, "request body must be a JSON object");
      return std::nullopt;
    }
    return j;
  } catch (const nlohmann::json::exception& e) {
    reply_error(res, 400, std::string("request body is not valid JSON: ") + e.what());
    return std::nullopt;
  }
}

// Accepts a policy as an embedded object or a JSON-encoded string.
policy::Policy policy_from_request(const nlohmann::json& value) {
  if (value.is_string()) return policy::parse_policy_json(value.get<std::string>());
  return curate::policy_from_json(value);
}

nlohmann::json verify_response(const verify::VerdictReport& report) {
  auto j = report.to_json();
  if (!report.passed && !report.diagnostics.empty()) {
    j["code"] = report.diagnostics.front().code;
  }
  return j;
}

void handle_verify(const httplib::Request& req, httplib::Response& res) {
  auto body = parse_body(req, res);
  if (!body) return;
  if (!body->contains("config") || !(*body)["config"].is_string()) {
    return reply_error(res, 400, "missing string field: config");
  }
  auto stage = body->value("stage", "FV1");
  auto config = (*body)["config"].get<std::string>();
  if (stage == "FV1") {
    reply_json(res, 200, verify_response(verify::validate_text(config)));
  } else if (stage == "FV2") {
    auto [report, doc] = verify::plan_text(config);
    auto j = verify_response(report);
    if (doc) j["plan"] = doc->to_json();
    reply_json(res, 200, j);
  } else {
    reply_error(res, 400, "stage must be FV1 or FV2");
  }
}

void handle_reward(const httplib::Request& req, httplib::Response& res) {
  auto body = parse_body(req, res);
  if (!body) return;
  if (!body->contains("config") || !(*body)["config"].is_string()) {
    return reply_error(res, 400, "missing string field: config");
  }
  if (!body->contains("policy")) {
    return reply_error(res, 400, "missing field: policy");
  }
  try {
    auto policy = policy_from_request((*body)["policy"]);
    auto breakdown =
        reward::compute_reward_text((*body)["config"].get<std::string>(), policy);
    reply_json(res, 200, breakdown.to_json());
  } catch (const policy::EmptyPolicy& e) {
    reply_error(res, 422, e.what());
  } catch (const policy::PolicyFormatError& e) {
    reply_error(res, 400, std::string("policy does not parse: ") + e.what());
  }
}

void handle_reward_batch(const httplib::Request& req, httplib::Response& res) {
  auto body = parse_body(req, res);
  if (!body) return;
  if (!body->contains("items") || !(*body)["items"].is_array()) {
    return reply_error(res, 400, "missing array field: items");
  }
  const auto& items = (*body)["items"];
  if (items.size() > kBatchItemCap) {
    return reply_error(res, 413, "batch exceeds " + std::to_string(kBatchItemCap) + " items");
  }
  bool group = body->value("group", false);

  nlohmann::json results = nlohmann::json::array();
  std::vector<double> rewards;
  try {
    for (const auto& item : items) {
      if (!item.is_object() || !item.contains("config") || !item["config"].is_string() ||
          !item.contains("policy")) {
        return reply_error(res, 400, "each item needs a config string and a policy");
      }
      auto policy = policy_from_request(item["policy"]);
      auto breakdown = reward::compute_reward_text(item["config"].get<std::string>(), policy);
      rewards.push_back(breakdown.reward);
      results.push_back(breakdown.to_json());
    }
  } catch (const policy::EmptyPolicy& e) {
    return reply_error(res, 422, e.what());
  } catch (const policy::PolicyFormatError& e) {
    return reply_error(res, 400, std::string("policy does not parse: ") + e.what());
  }

  nlohmann::json response{{"results", std::move(results)}};
  if (group) {
    if (rewards.empty()) {
      return reply_error(res, 400, "group advantages need a non-empty batch");
    }
    response["group"] = reward::group_advantages(rewards).to_json();
  }
  reply_json(res, 200, response);
}

}  // namespace

struct RewardService::Impl {
  httplib::Server server;
  std::thread worker;

  Impl() {
    server.Get("/healthz", [](const httplib::Request&, httplib::Response& res) {
      res.set_content("ok", "text/plain");
    });
    server.Post("/v1/verify", handle_verify);
    server.Post("/v1/reward", handle_reward);
    server.Post("/v1/reward/batch", handle_reward_batch);
  }
};

RewardService::RewardService() : impl_(std::make_unique<Impl>()) {}

RewardService::~RewardService() { stop(); }

bool RewardService::run(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

int RewardService::start_background(const std::string& host) {
  int port = impl_->server.bind_to_any_port(host);
  if (port < 0) return -1;
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void RewardService::stop() {
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace iacforge::service
