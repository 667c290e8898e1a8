// SPDX-License-Identifier: Apache-2.0
#include "cxrt/tools/adapter_clock.hpp"

namespace cxrt::tools {

double& adapter_ms() noexcept {
  thread_local double ms = 0.0;
  return ms;
}

AdapterTimer::~AdapterTimer() {
  adapter_ms() += std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
}

}  // namespace cxrt::tools
