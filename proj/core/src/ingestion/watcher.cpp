// SPDX-License-Identifier: Apache-2.0
#include "cxrt/ingestion/watcher.hpp"

#include <algorithm>
#include <thread>

namespace cxrt::ingestion {

namespace fs = std::filesystem;

FolderWatcher::FolderWatcher(fs::path dir, WatchOptions options) : dir_(std::move(dir)), options_(options) {}

std::vector<WatchEvent> FolderWatcher::poll(Clock::time_point now) {
  std::error_code ec;
  if (!fs::is_directory(dir_, ec)) throw DataError("watch directory vanished: " + dir_.string());

  std::vector<fs::path> present;
  for (fs::directory_iterator it(dir_, ec), end; !ec && it != end; it.increment(ec)) {
    const fs::path& p = it->path();
    if (p.filename().string().starts_with('.')) continue;
    if (!it->is_regular_file(ec) || !has_accepted_suffix(p)) continue;
    present.push_back(p);
  }
  if (ec && !fs::is_directory(dir_)) throw DataError("watch directory vanished: " + dir_.string());
  std::sort(present.begin(), present.end());

  // Forget pending files that disappeared before becoming stable.
  std::erase_if(pending_, [&](const auto& kv) { return !std::binary_search(present.begin(), present.end(), kv.first); });

  std::vector<std::pair<std::uint64_t, fs::path>> ready;
  for (const fs::path& p : present) {
    if (emitted_.contains(p)) continue;
    std::error_code size_ec;
    const auto size = fs::file_size(p, size_ec);
    if (size_ec) continue;
    auto [it, inserted] = pending_.try_emplace(p);
    Pending& entry = it->second;
    if (inserted) {
      entry = Pending{size, now, next_seq_++, 1};
      continue;
    }
    if (entry.size != size) {
      entry.size = size;
      entry.stable_since = now;
      entry.observations = 1;
      continue;
    }
    ++entry.observations;
    if (entry.observations >= 2 && now - entry.stable_since >= options_.stability_window) {
      ready.emplace_back(entry.detection_seq, p);
    }
  }
  std::sort(ready.begin(), ready.end());

  std::vector<WatchEvent> events;
  events.reserve(ready.size());
  for (const auto& [seq, p] : ready) {
    pending_.erase(p);
    emitted_.insert(p);
    try {
      events.emplace_back(load_raw_case(p));
    } catch (const QuarantineError& e) {
      events.emplace_back(QuarantineEvent{p, e.reason()});
    }
  }
  return events;
}

void FolderWatcher::run(std::stop_token stop, const std::function<void(WatchEvent)>& sink) {
  while (!stop.stop_requested()) {
    for (auto& event : poll(Clock::now())) sink(std::move(event));
    const auto deadline = Clock::now() + options_.poll_interval;
    while (!stop.stop_requested() && Clock::now() < deadline) {
      std::this_thread::sleep_for(std::min<Clock::duration>(options_.poll_interval, std::chrono::milliseconds(20)));
    }
  }
}

}  // namespace cxrt::ingestion
