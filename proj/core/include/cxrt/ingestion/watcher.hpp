// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <stop_token>
#include <string>
#include <variant>
#include <vector>

#include "cxrt/ingestion/raw_case.hpp"

namespace cxrt::ingestion {

struct WatchOptions {
  std::chrono::milliseconds poll_interval{500};
  std::chrono::milliseconds stability_window{1000};
};

struct QuarantineEvent {
  std::filesystem::path path;
  std::string reason;
};

using WatchEvent = std::variant<RawCase, QuarantineEvent>;

/// Polling folder watcher. A file is emitted once, after its size has been
/// observed unchanged on consecutive polls spanning at least the stability
/// window. Files that become ready on the same poll are emitted in the order
/// they were first detected (ties by name). Hidden files are ignored.
class FolderWatcher {
 public:
  using Clock = std::chrono::steady_clock;

  FolderWatcher(std::filesystem::path dir, WatchOptions options);

  /// One polling pass. Throws DataError if the directory no longer exists.
  std::vector<WatchEvent> poll(Clock::time_point now);

  /// Polls until `stop` is requested. Exceptions from `poll` propagate.
  void run(std::stop_token stop, const std::function<void(WatchEvent)>& sink);

  std::size_t emitted_count() const noexcept { return emitted_.size(); }

 private:
  struct Pending {
    std::uintmax_t size = 0;
    Clock::time_point stable_since;
    std::uint64_t detection_seq = 0;
    int observations = 0;
  };

  std::filesystem::path dir_;
  WatchOptions options_;
  std::map<std::filesystem::path, Pending> pending_;
  std::set<std::filesystem::path> emitted_;
  std::uint64_t next_seq_ = 0;
};

}  // namespace cxrt::ingestion
