// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cctype>
#include <fstream>
#include <iterator>

#include "cxrt/ingestion/raw_case.hpp"

namespace cxrt::ingestion {

std::string_view to_string(ImageFormat f) noexcept {
  switch (f) {
    case ImageFormat::dicom: return "dicom";
    case ImageFormat::png: return "png";
    case ImageFormat::jpeg: return "jpeg";
  }
  return "unknown";
}

std::optional<ImageFormat> sniff_format(std::span<const std::uint8_t> bytes) noexcept {
  static constexpr std::array<std::uint8_t, 8> kPng = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
  if (bytes.size() >= kPng.size() && std::equal(kPng.begin(), kPng.end(), bytes.begin())) {
    return ImageFormat::png;
  }
  if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF) return ImageFormat::jpeg;
  if (bytes.size() >= 132 && bytes[128] == 'D' && bytes[129] == 'I' && bytes[130] == 'C' && bytes[131] == 'M') {
    return ImageFormat::dicom;
  }
  return std::nullopt;
}

bool has_accepted_suffix(const std::filesystem::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return ext == ".dcm" || ext == ".png" || ext == ".jpg" || ext == ".jpeg";
}

RawCase load_raw_case(const std::filesystem::path& path, std::chrono::system_clock::time_point detected_at) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw QuarantineError("unreadable", path.string());
  std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  if (in.bad()) throw QuarantineError("unreadable", path.string());
  if (bytes.empty()) throw QuarantineError("empty_file", path.string());
  const auto format = sniff_format(bytes);
  if (!format) throw QuarantineError("unrecognized_format", path.string());
  return RawCase{path, *format, std::move(bytes), detected_at};
}

}  // namespace cxrt::ingestion
