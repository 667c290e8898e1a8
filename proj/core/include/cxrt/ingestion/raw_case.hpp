// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cxrt/error.hpp"

namespace cxrt::ingestion {

enum class ImageFormat { dicom, png, jpeg };

std::string_view to_string(ImageFormat f) noexcept;

/// Format from magic bytes only: PNG signature, JPEG SOI marker, or the DICOM
/// "DICM" preamble tag at offset 128.
std::optional<ImageFormat> sniff_format(std::span<const std::uint8_t> bytes) noexcept;

/// .dcm, .png, .jpg, .jpeg (case-insensitive).
bool has_accepted_suffix(const std::filesystem::path& path);

struct RawCase {
  std::filesystem::path source_path;
  ImageFormat format = ImageFormat::png;
  std::vector<std::uint8_t> bytes;
  std::chrono::system_clock::time_point detected_at;
};

/// Raised when a file cannot enter the pipeline; `reason()` is a short
/// machine-readable code such as "unreadable" or "unsupported_format".
class QuarantineError : public DataError {
 public:
  QuarantineError(std::string reason, const std::string& detail)
      : DataError(reason + ": " + detail), reason_(std::move(reason)) {}
  const std::string& reason() const noexcept { return reason_; }

 private:
  std::string reason_;
};

/// Reads and sniffs a file. Throws QuarantineError("unreadable" | "empty_file" | "unrecognized_format").
RawCase load_raw_case(const std::filesystem::path& path,
                      std::chrono::system_clock::time_point detected_at = std::chrono::system_clock::now());

}  // namespace cxrt::ingestion
