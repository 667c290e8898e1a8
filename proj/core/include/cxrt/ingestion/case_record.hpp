// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <unordered_map>

#include "cxrt/grid.hpp"
#include "cxrt/image_io.hpp"
#include "cxrt/ingestion/raw_case.hpp"

namespace cxrt::ingestion {

/// A normalized case. Immutable once built; shared across worker threads by
/// `CaseHandle`.
struct CaseRecord {
  std::string case_id;
  Image pixels;  // kCaseSize x kCaseSize, values in [0,1]
  std::chrono::system_clock::time_point received_at;
  std::map<std::string, std::string> source_meta;

  std::string meta(const std::string& key) const {
    auto it = source_meta.find(key);
    return it == source_meta.end() ? std::string{} : it->second;
  }
};

using CaseHandle = std::shared_ptr<const CaseRecord>;

using DicomDecoder = std::function<DecodedImage(std::span<const std::uint8_t>)>;

/// Header keys removed from source metadata. Configuration, not a complete PHI list.
std::set<std::string> default_phi_drop_list();

struct NormalizeOptions {
  std::set<std::string> phi_drop_list = default_phi_drop_list();
  DicomDecoder dicom_decoder;  // empty: DICOM inputs are quarantined as unsupported_format
  int target_size = kCaseSize;
};

/// Decode to 8-bit gray, scale by 1/255, bilinearly resize to target_size^2.
/// Throws QuarantineError("undecodable" | "unsupported_format" | "zero_area").
CaseRecord normalize_case(const RawCase& raw, std::string case_id, const NormalizeOptions& options = {});

/// First 16 hex chars of the SHA-256 of the file bytes.
std::string content_case_id(std::span<const std::uint8_t> bytes);

/// Thread-safe id assignment: content hash, with a "-N" counter suffix when
/// the same content was already seen in this run.
class CaseIdAllocator {
 public:
  std::string assign(std::span<const std::uint8_t> bytes);

 private:
  std::mutex mutex_;
  std::unordered_map<std::string, int> seen_;
};

}  // namespace cxrt::ingestion
