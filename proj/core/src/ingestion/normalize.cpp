// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cctype>

#include "cxrt/encoding.hpp"
#include "cxrt/ingestion/case_record.hpp"
#include "cxrt/resample.hpp"

namespace cxrt::ingestion {

namespace {

std::string lowercase(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return std::tolower(ch); });
  return s;
}

}  // namespace

std::set<std::string> default_phi_drop_list() {
  return {"PatientName",        "PatientID",        "PatientBirthDate", "PatientSex",
          "PatientAddress",     "OtherPatientIDs",  "AccessionNumber",  "InstitutionName",
          "ReferringPhysicianName", "StudyDate",    "StudyTime",        "Author"};
}

CaseRecord normalize_case(const RawCase& raw, std::string case_id, const NormalizeOptions& options) {
  DecodedImage decoded;
  try {
    switch (raw.format) {
      case ImageFormat::png: decoded = decode_png(raw.bytes); break;
      case ImageFormat::jpeg: decoded = decode_jpeg(raw.bytes); break;
      case ImageFormat::dicom:
        if (!options.dicom_decoder) throw QuarantineError("unsupported_format", "no DICOM decoder configured");
        decoded = options.dicom_decoder(raw.bytes);
        break;
    }
  } catch (const QuarantineError&) {
    throw;
  } catch (const std::exception& e) {
    throw QuarantineError("undecodable", e.what());
  }
  if (decoded.pixels.rows() == 0 || decoded.pixels.cols() == 0) {
    throw QuarantineError("zero_area", raw.source_path.string());
  }

  CaseRecord record;
  record.case_id = std::move(case_id);
  record.received_at = raw.detected_at;
  record.pixels = resize_bilinear(from_gray8(decoded.pixels), options.target_size, options.target_size);

  std::set<std::string> drop;
  for (const auto& key : options.phi_drop_list) drop.insert(lowercase(key));
  for (const auto& [key, value] : decoded.header) {
    if (!drop.contains(lowercase(key))) record.source_meta["header." + key] = value;
  }
  record.source_meta["format"] = std::string(to_string(raw.format));
  record.source_meta["original_rows"] = std::to_string(decoded.pixels.rows());
  record.source_meta["original_cols"] = std::to_string(decoded.pixels.cols());
  record.source_meta["resize"] = "bilinear";
  record.source_meta["source_path"] = raw.source_path.string();
  record.source_meta["source_name"] = raw.source_path.filename().string();
  return record;
}

std::string content_case_id(std::span<const std::uint8_t> bytes) { return sha256_hex(bytes).substr(0, 16); }

}  // namespace cxrt::ingestion
