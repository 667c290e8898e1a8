// SPDX-License-Identifier: Apache-2.0
#include "cxrt/ingestion/case_record.hpp"

namespace cxrt::ingestion {

std::string CaseIdAllocator::assign(std::span<const std::uint8_t> bytes) {
  const std::string base = content_case_id(bytes);
  std::lock_guard lock(mutex_);
  const int count = seen_[base]++;
  return count == 0 ? base : base + "-" + std::to_string(count);
}

}  // namespace cxrt::ingestion
