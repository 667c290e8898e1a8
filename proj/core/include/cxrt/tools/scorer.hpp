// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>

#include "cxrt/grid.hpp"
#include "cxrt/ingestion/case_record.hpp"
#include "cxrt/tools/augment.hpp"
#include "cxrt/tools/confidence.hpp"

namespace cxrt::tools {

using ingestion::CaseRecord;

enum class Transport { in_process_stub, subprocess_line_protocol, remote_http };

std::string_view to_string(Transport t) noexcept;

struct Capabilities {
  bool posterior = true;
  bool cam = false;
};

/// What a scorer is asked to evaluate. The augmented image is produced only
/// when an adapter actually needs pixels (`materialize`), so stubs that key
/// on case identity never pay for it.
struct ScoringRequest {
  const CaseRecord& record;
  std::optional<Augmentation> augmentation;
  int sample_index = -1;  // TTA sample number, -1 for the un-augmented image

  Image materialize() const;
};

/// Classifier endpoint returning P(positive | x). Implementations must be
/// safe to call from several worker threads. Failures throw AdapterError.
class ScorerAdapter {
 public:
  virtual ~ScorerAdapter() = default;

  virtual std::string id() const = 0;
  virtual std::string version() const = 0;
  virtual Transport transport() const = 0;
  virtual Capabilities capabilities() const { return {}; }

  virtual double score(const ScoringRequest& request) = 0;

  /// Raw class-activation heatmap at the model's own resolution, if supported.
  virtual std::optional<Image> cam(const CaseRecord&) { return std::nullopt; }
};

using ScorerPtr = std::shared_ptr<ScorerAdapter>;

/// In-process test double backed by callables. Deterministic as long as the
/// callables are.
class FunctionScorer : public ScorerAdapter {
 public:
  using ScoreFn = std::function<double(const ScoringRequest&)>;
  using CamFn = std::function<std::optional<Image>(const CaseRecord&)>;

  FunctionScorer(std::string id, std::string version, ScoreFn score, CamFn cam = {});

  std::string id() const override { return id_; }
  std::string version() const override { return version_; }
  Transport transport() const override { return Transport::in_process_stub; }
  Capabilities capabilities() const override { return {true, static_cast<bool>(cam_)}; }
  double score(const ScoringRequest& request) override { return score_(request); }
  std::optional<Image> cam(const CaseRecord& record) override { return cam_ ? cam_(record) : std::nullopt; }

 private:
  std::string id_;
  std::string version_;
  ScoreFn score_;
  CamFn cam_;
};

/// Pixel-driven stub: a logistic function of the (augmented) image's central
/// mean intensity. Identical pixels give identical posteriors.
class IntensityStubScorer : public ScorerAdapter {
 public:
  explicit IntensityStubScorer(std::string id = "intensity-stub", double gain = 12.0, double midpoint = 0.5);

  std::string id() const override { return id_; }
  std::string version() const override { return "1"; }
  Transport transport() const override { return Transport::in_process_stub; }
  Capabilities capabilities() const override { return {true, true}; }
  double score(const ScoringRequest& request) override;
  std::optional<Image> cam(const CaseRecord& record) override;

 private:
  std::string id_;
  double gain_;
  double midpoint_;
};

/// Speaks the line protocol to a long-lived child process: one request per
/// line, "<png path>\t<case_id>", one response per line, the posterior as a
/// decimal. Images are written as normalized 8-bit PNGs to `scratch_dir`.
class SubprocessScorer : public ScorerAdapter {
 public:
  SubprocessScorer(std::string id, std::string command, std::string scratch_dir,
                   std::chrono::milliseconds timeout = std::chrono::seconds(30));
  ~SubprocessScorer() override;

  std::string id() const override { return id_; }
  std::string version() const override { return version_; }
  Transport transport() const override { return Transport::subprocess_line_protocol; }
  double score(const ScoringRequest& request) override;

 private:
  void start_locked();
  void stop_locked() noexcept;

  std::string id_;
  std::string version_ = "subprocess";
  std::string command_;
  std::string scratch_dir_;
  std::chrono::milliseconds timeout_;
  std::mutex mutex_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string read_buffer_;
  unsigned long long counter_ = 0;
};

/// Remote scorer over HTTP: POST {case_id, image: base64 PNG, augmentation?}
/// to `url`; response {p, cam?: base64 PNG, model_version}.
class HttpScorer : public ScorerAdapter {
 public:
  HttpScorer(std::string id, std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(30),
             bool advertise_cam = false);

  std::string id() const override { return id_; }
  std::string version() const override;
  Transport transport() const override { return Transport::remote_http; }
  Capabilities capabilities() const override { return {true, advertise_cam_}; }
  double score(const ScoringRequest& request) override;
  std::optional<Image> cam(const CaseRecord& record) override;

 private:
  struct Response {
    double p = 0;
    std::optional<Image> cam;
    std::string model_version;
  };
  Response post(const ScoringRequest& request, bool want_cam);

  std::string id_;
  std::string url_;
  std::chrono::milliseconds timeout_;
  bool advertise_cam_;
  mutable std::mutex mutex_;
  std::string model_version_ = "unknown";
};

inline constexpr int kDefaultRetries = 2;

/// Calls `fn` up to 1 + retries times, retrying only on AdapterError.
template <typename Fn>
auto with_retries(int retries, Fn&& fn) -> decltype(fn()) {
  for (int attempt = 0;; ++attempt) {
    try {
      return fn();
    } catch (const AdapterError&) {
      if (attempt >= retries) throw;
    }
  }
}

/// Posterior from the adapter (validated to [0,1]) and the derived signal.
ConfidenceSignal base_score(const CaseRecord& record, ScorerAdapter& adapter, int retries = kDefaultRetries);

}  // namespace cxrt::tools
