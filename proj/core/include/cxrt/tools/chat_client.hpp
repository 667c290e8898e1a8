// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>

#include "cxrt/grid.hpp"

namespace cxrt::tools {

/// Generic chat-completion request. `image`, when set, is attached as a PNG by
/// transports that send pixels.
struct ChatRequest {
  std::string system;
  std::string user;
  const Image* image = nullptr;
  std::string case_id;  // correlation only; not sent by network transports
};

class ChatClient {
 public:
  virtual ~ChatClient() = default;
  virtual std::string model_id() const = 0;
  /// Returns the assistant text. Throws AdapterError on transport failure.
  virtual std::string complete(const ChatRequest& request) = 0;
};

using ChatClientPtr = std::shared_ptr<ChatClient>;

struct HttpChatConfig {
  std::string base_url;                        // e.g. https://api.example.com
  std::string path = "/v1/chat/completions";
  std::string model;
  std::string token;
  std::chrono::milliseconds timeout{60000};

  /// Fills unset fields from CXRT_LLM_ENDPOINT, CXRT_LLM_MODEL, CXRT_LLM_TOKEN.
  static HttpChatConfig from_environment(HttpChatConfig base);
  static HttpChatConfig from_environment();
};

/// OpenAI-style chat-completions client.
class HttpChatClient : public ChatClient {
 public:
  explicit HttpChatClient(HttpChatConfig config);
  std::string model_id() const override { return config_.model; }
  std::string complete(const ChatRequest& request) override;

 private:
  HttpChatConfig config_;
};

/// Test double backed by a callable.
class ScriptedChatClient : public ChatClient {
 public:
  using Fn = std::function<std::string(const ChatRequest&)>;
  ScriptedChatClient(std::string model, Fn fn) : model_(std::move(model)), fn_(std::move(fn)) {}
  std::string model_id() const override { return model_; }
  std::string complete(const ChatRequest& request) override { return fn_(request); }

 private:
  std::string model_;
  Fn fn_;
};

}  // namespace cxrt::tools
