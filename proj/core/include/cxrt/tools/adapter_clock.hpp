// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <string>

#include "cxrt/tools/chat_client.hpp"
#include "cxrt/tools/scorer.hpp"

namespace cxrt::tools {

/// Milliseconds spent inside adapter calls on the current thread.
double& adapter_ms() noexcept;

/// Adds its own lifetime to adapter_ms().
class AdapterTimer {
 public:
  AdapterTimer() : start_(std::chrono::steady_clock::now()) {}
  ~AdapterTimer();
  AdapterTimer(const AdapterTimer&) = delete;
  AdapterTimer& operator=(const AdapterTimer&) = delete;

 private:
  std::chrono::steady_clock::time_point start_;
};

/// Forwards to `inner`, charging each call to adapter_ms().
class TimedScorer : public ScorerAdapter {
 public:
  explicit TimedScorer(ScorerPtr inner) : inner_(std::move(inner)) {}

  std::string id() const override { return inner_->id(); }
  std::string version() const override { return inner_->version(); }
  Transport transport() const override { return inner_->transport(); }
  Capabilities capabilities() const override { return inner_->capabilities(); }
  double score(const ScoringRequest& request) override {
    AdapterTimer t;
    return inner_->score(request);
  }
  std::optional<Image> cam(const CaseRecord& record) override {
    AdapterTimer t;
    return inner_->cam(record);
  }

 private:
  ScorerPtr inner_;
};

class TimedChatClient : public ChatClient {
 public:
  explicit TimedChatClient(ChatClientPtr inner) : inner_(std::move(inner)) {}
  std::string model_id() const override { return inner_->model_id(); }
  std::string complete(const ChatRequest& request) override {
    AdapterTimer t;
    return inner_->complete(request);
  }

 private:
  ChatClientPtr inner_;
};

}  // namespace cxrt::tools
