// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cxrt/grid.hpp"
#include "cxrt/ingestion/case_record.hpp"

namespace cxrt::quantify {

using ingestion::CaseRecord;

enum class MaskTarget { lung, rib, device };

std::string_view to_string(MaskTarget t) noexcept;

/// Binary masks (values in {0,1}) matching the case image.
struct MaskSet {
  Mask lung;
  Mask rib;
  Mask device;
};

class SegmentationAdapter {
 public:
  virtual ~SegmentationAdapter() = default;
  virtual std::string id() const = 0;
  /// Mask for `target`; any nonzero value counts as inside. Throws AdapterError.
  virtual Mask segment(const CaseRecord& record, MaskTarget target) = 0;
};

using SegmenterPtr = std::shared_ptr<SegmentationAdapter>;

class FunctionSegmenter : public SegmentationAdapter {
 public:
  using Fn = std::function<Mask(const CaseRecord&, MaskTarget)>;
  FunctionSegmenter(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}
  std::string id() const override { return id_; }
  Mask segment(const CaseRecord& record, MaskTarget target) override { return fn_(record, target); }

 private:
  std::string id_;
  Fn fn_;
};

/// Fixed geometric masks: two elliptical lung fields, thin oblique rib bands
/// inside them and a small rectangular device patch.
class SyntheticSegmenter : public SegmentationAdapter {
 public:
  std::string id() const override { return "synthetic-seg"; }
  Mask segment(const CaseRecord& record, MaskTarget target) override;

  static Mask lung_mask(int rows, int cols);
  static Mask rib_mask(int rows, int cols);
  static Mask device_mask(int rows, int cols);
};

/// POST {case_id, image: base64 PNG, target} -> {mask: base64 PNG}.
class HttpSegmenter : public SegmentationAdapter {
 public:
  HttpSegmenter(std::string id, std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(30));
  std::string id() const override { return id_; }
  Mask segment(const CaseRecord& record, MaskTarget target) override;

 private:
  std::string id_;
  std::string url_;
  std::chrono::milliseconds timeout_;
};

/// Replaces the masked region of an image. Throws AdapterError.
class InpaintAdapter {
 public:
  virtual ~InpaintAdapter() = default;
  virtual std::string id() const = 0;
  virtual Image inpaint(const Image& image, const Mask& mask) = 0;
};

using InpainterPtr = std::shared_ptr<InpaintAdapter>;

class FunctionInpainter : public InpaintAdapter {
 public:
  using Fn = std::function<Image(const Image&, const Mask&)>;
  FunctionInpainter(std::string id, Fn fn) : id_(std::move(id)), fn_(std::move(fn)) {}
  std::string id() const override { return id_; }
  Image inpaint(const Image& image, const Mask& mask) override { return fn_(image, mask); }

 private:
  std::string id_;
  Fn fn_;
};

/// POST {image: base64 PNG, mask: base64 PNG} -> {image: base64 PNG}.
class HttpInpainter : public InpaintAdapter {
 public:
  HttpInpainter(std::string id, std::string url, std::chrono::milliseconds timeout = std::chrono::seconds(60));
  std::string id() const override { return id_; }
  Image inpaint(const Image& image, const Mask& mask) override;

 private:
  std::string id_;
  std::string url_;
  std::chrono::milliseconds timeout_;
};

struct SegmentationAdapters {
  SegmenterPtr lung;
  SegmenterPtr rib;     // optional
  SegmenterPtr device;  // optional
};

struct FetchedMasks {
  MaskSet masks;
  std::vector<std::string> notes;
};

/// Lung mask is required: a missing or failing lung adapter throws
/// AdapterError. Missing or failing rib/device adapters give empty masks and
/// a note. Masks are binarized and checked against the image shape.
FetchedMasks fetch_masks(const CaseRecord& record, const SegmentationAdapters& adapters);

/// Nonzero -> 1. Throws DataError when the shape differs from rows x cols.
Mask binarize(const Mask& mask, int rows, int cols);

}  // namespace cxrt::quantify
