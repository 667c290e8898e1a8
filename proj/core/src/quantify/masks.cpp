// SPDX-License-Identifier: Apache-2.0
#define CPPHTTPLIB_OPENSSL_SUPPORT
#include "cxrt/quantify/masks.hpp"

#include <httplib.h>
#include <nlohmann/json.hpp>

#include <cmath>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"
#include "cxrt/image_io.hpp"

namespace cxrt::quantify {

using json = nlohmann::json;

std::string_view to_string(MaskTarget t) noexcept {
  switch (t) {
    case MaskTarget::lung: return "lung";
    case MaskTarget::rib: return "rib";
    case MaskTarget::device: return "device";
  }
  return "lung";
}

Mask binarize(const Mask& mask, int rows, int cols) {
  if (mask.rows() != rows || mask.cols() != cols) {
    throw DataError("mask is " + std::to_string(mask.rows()) + "x" + std::to_string(mask.cols()) + ", expected " +
                    std::to_string(rows) + "x" + std::to_string(cols));
  }
  Mask out(rows, cols);
  auto dst = out.values();
  auto src = mask.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] != 0 ? 1 : 0;
  return out;
}

Mask SyntheticSegmenter::lung_mask(int rows, int cols) {
  Mask m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const double y = (r + 0.5) / rows - 0.5;
      for (double cx : {0.30, 0.70}) {
        const double x = (c + 0.5) / cols - cx;
        if ((y * y) / (0.30 * 0.30) + (x * x) / (0.14 * 0.14) <= 1.0) m(r, c) = 1;
      }
    }
  }
  return m;
}

Mask SyntheticSegmenter::rib_mask(int rows, int cols) {
  const Mask lung = lung_mask(rows, cols);
  Mask m(rows, cols);
  const int period = std::max(8, rows / 10);
  const int thickness = std::max(1, rows / 64);
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      if (!lung(r, c)) continue;
      const int slant = c < cols / 2 ? c / 4 : (cols - c) / 4;
      if ((r + slant) % period < thickness) m(r, c) = 1;
    }
  }
  return m;
}

Mask SyntheticSegmenter::device_mask(int rows, int cols) {
  Mask m(rows, cols);
  for (int r = rows * 60 / 100; r < rows * 65 / 100; ++r) {
    for (int c = cols * 45 / 100; c < cols * 55 / 100; ++c) m(r, c) = 1;
  }
  return m;
}

Mask SyntheticSegmenter::segment(const CaseRecord& record, MaskTarget target) {
  const int rows = record.pixels.rows();
  const int cols = record.pixels.cols();
  switch (target) {
    case MaskTarget::lung: return lung_mask(rows, cols);
    case MaskTarget::rib: return rib_mask(rows, cols);
    case MaskTarget::device: return device_mask(rows, cols);
  }
  return Mask(rows, cols);
}

namespace {

std::pair<std::string, std::string> split_url(const std::string& url) {
  const auto scheme = url.find("://");
  const auto path_start = url.find('/', scheme == std::string::npos ? 0 : scheme + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

json post_json(const std::string& id, const std::string& url, std::chrono::milliseconds timeout, const json& body) {
  const auto [base, path] = split_url(url);
  httplib::Client client(base);
  const auto secs = std::max<long>(1, std::chrono::duration_cast<std::chrono::seconds>(timeout).count());
  client.set_connection_timeout(static_cast<time_t>(secs), 0);
  client.set_read_timeout(static_cast<time_t>(secs), 0);
  const auto res = client.Post(path, body.dump(), "application/json");
  if (!res) throw AdapterError(id + ": endpoint unreachable: " + httplib::to_string(res.error()));
  if (res->status != 200) throw AdapterError(id + ": endpoint returned HTTP " + std::to_string(res->status));
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw AdapterError(id + ": malformed reply: " + e.what());
  }
}

Gray8 decode_field(const std::string& id, const json& reply, const char* key) {
  try {
    return decode_png(base64_decode(reply.at(key).get<std::string>())).pixels;
  } catch (const json::exception& e) {
    throw AdapterError(id + ": reply lacks '" + key + "': " + e.what());
  } catch (const DataError& e) {
    throw AdapterError(id + ": undecodable '" + key + "': " + e.what());
  }
}

std::string mask_png_base64(const Mask& mask) {
  Gray8 g(mask.rows(), mask.cols());
  auto dst = g.values();
  auto src = mask.values();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] ? 255 : 0;
  return base64_encode(encode_png(g));
}

}  // namespace

HttpSegmenter::HttpSegmenter(std::string id, std::string url, std::chrono::milliseconds timeout)
    : id_(std::move(id)), url_(std::move(url)), timeout_(timeout) {}

Mask HttpSegmenter::segment(const CaseRecord& record, MaskTarget target) {
  const json body = {{"case_id", record.case_id},
                     {"image", base64_encode(encode_png(to_gray8(record.pixels)))},
                     {"target", to_string(target)}};
  return decode_field(id_, post_json(id_, url_, timeout_, body), "mask");
}

HttpInpainter::HttpInpainter(std::string id, std::string url, std::chrono::milliseconds timeout)
    : id_(std::move(id)), url_(std::move(url)), timeout_(timeout) {}

Image HttpInpainter::inpaint(const Image& image, const Mask& mask) {
  const json body = {{"image", base64_encode(encode_png(to_gray8(image)))}, {"mask", mask_png_base64(mask)}};
  return from_gray8(decode_field(id_, post_json(id_, url_, timeout_, body), "image"));
}

FetchedMasks fetch_masks(const CaseRecord& record, const SegmentationAdapters& adapters) {
  const int rows = record.pixels.rows();
  const int cols = record.pixels.cols();
  if (!adapters.lung) throw AdapterError("no lung segmentation adapter");
  FetchedMasks out;
  try {
    out.masks.lung = binarize(adapters.lung->segment(record, MaskTarget::lung), rows, cols);
  } catch (const DataError& e) {
    throw AdapterError(std::string("lung segmentation: ") + e.what());
  }
  auto optional_mask = [&](const SegmenterPtr& adapter, MaskTarget target) {
    if (!adapter) {
      out.notes.push_back(std::string(to_string(target)) + "_seg_absent");
      return Mask(rows, cols);
    }
    try {
      return binarize(adapter->segment(record, target), rows, cols);
    } catch (const Error& e) {
      out.notes.push_back(std::string(to_string(target)) + "_seg_unavailable: " + e.what());
      return Mask(rows, cols);
    }
  };
  out.masks.rib = optional_mask(adapters.rib, MaskTarget::rib);
  out.masks.device = optional_mask(adapters.device, MaskTarget::device);
  return out;
}

}  // namespace cxrt::quantify
