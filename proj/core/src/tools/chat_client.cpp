// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "cxrt/tools/chat_client.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cstdlib>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"
#include "cxrt/image_io.hpp"

namespace cxrt::tools {

using json = nlohmann::json;

HttpChatConfig HttpChatConfig::from_environment(HttpChatConfig base) {
  auto fill = [](std::string& field, const char* var) {
    if (!field.empty()) return;
    if (const char* v = std::getenv(var)) field = v;
  };
  fill(base.base_url, "CXRT_LLM_ENDPOINT");
  fill(base.model, "CXRT_LLM_MODEL");
  fill(base.token, "CXRT_LLM_TOKEN");
  return base;
}

HttpChatConfig HttpChatConfig::from_environment() { return from_environment(HttpChatConfig{}); }

HttpChatClient::HttpChatClient(HttpChatConfig config) : config_(std::move(config)) {
  if (config_.base_url.empty()) throw UsageError("chat client endpoint is not configured");
}

std::string HttpChatClient::complete(const ChatRequest& request) {
  json messages = json::array();
  if (!request.system.empty()) messages.push_back({{"role", "system"}, {"content", request.system}});
  if (request.image != nullptr) {
    const auto png = encode_png(to_gray8(*request.image));
    json content = json::array();
    content.push_back({{"type", "text"}, {"text", request.user}});
    content.push_back({{"type", "image_url"}, {"image_url", {{"url", "data:image/png;base64," + base64_encode(png)}}}});
    messages.push_back({{"role", "user"}, {"content", std::move(content)}});
  } else {
    messages.push_back({{"role", "user"}, {"content", request.user}});
  }
  const json body = {{"model", config_.model}, {"messages", std::move(messages)}, {"temperature", 0}};

  httplib::Client client(config_.base_url);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(config_.timeout).count();
  client.set_connection_timeout(static_cast<time_t>(secs), 0);
  client.set_read_timeout(static_cast<time_t>(secs), 0);
  httplib::Headers headers;
  if (!config_.token.empty()) headers.emplace("Authorization", "Bearer " + config_.token);
  const auto res = client.Post(config_.path, headers, body.dump(), "application/json");
  if (!res) throw AdapterError("chat endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw AdapterError("chat endpoint returned HTTP " + std::to_string(res->status));
  try {
    const json reply = json::parse(res->body);
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const json::exception& e) {
    throw AdapterError(std::string("chat endpoint reply is malformed: ") + e.what());
  }
}

}  // namespace cxrt::tools
