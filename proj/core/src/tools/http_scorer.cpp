// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>
#include <nlohmann/json.hpp>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"
#include "cxrt/image_io.hpp"
#include "cxrt/tools/scorer.hpp"

namespace cxrt::tools {

using json = nlohmann::json;

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

}  // namespace

HttpScorer::HttpScorer(std::string id, std::string url, std::chrono::milliseconds timeout, bool advertise_cam)
    : id_(std::move(id)), url_(std::move(url)), timeout_(timeout), advertise_cam_(advertise_cam) {}

std::string HttpScorer::version() const {
  std::lock_guard lock(mutex_);
  return model_version_;
}

HttpScorer::Response HttpScorer::post(const ScoringRequest& request, bool want_cam) {
  const auto png = encode_png(to_gray8(request.materialize()));
  json body = {{"case_id", request.record.case_id}, {"image", base64_encode(png)}, {"want_cam", want_cam}};
  if (request.augmentation) {
    body["sample_index"] = request.sample_index;
    body["augmentation"] = {{"hflip", request.augmentation->hflip},
                            {"rotation_deg", request.augmentation->rotation_deg},
                            {"contrast", request.augmentation->contrast}};
  }

  const auto [base, path] = split_url(url_);
  httplib::Client client(base);
  const auto secs = std::max<long>(1, std::chrono::duration_cast<std::chrono::seconds>(timeout_).count());
  client.set_connection_timeout(static_cast<time_t>(secs), 0);
  client.set_read_timeout(static_cast<time_t>(secs), 0);
  const auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw AdapterError(id_ + ": scorer unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw AdapterError(id_ + ": scorer returned HTTP " + std::to_string(res->status));

  Response out;
  try {
    const json reply = json::parse(res->body);
    out.p = reply.at("p").get<double>();
    out.model_version = reply.value("model_version", std::string("unknown"));
    if (reply.contains("cam") && reply["cam"].is_string()) {
      out.cam = from_gray8(decode_png(base64_decode(reply["cam"].get<std::string>())).pixels);
    }
  } catch (const json::exception& e) {
    throw AdapterError(id_ + ": malformed scorer reply: " + e.what());
  } catch (const DataError& e) {
    throw AdapterError(id_ + ": malformed scorer heatmap: " + e.what());
  }
  std::lock_guard lock(mutex_);
  model_version_ = out.model_version;
  return out;
}

double HttpScorer::score(const ScoringRequest& request) { return post(request, false).p; }

std::optional<Image> HttpScorer::cam(const CaseRecord& record) {
  return post(ScoringRequest{record, std::nullopt, -1}, true).cam;
}

}  // namespace cxrt::tools
