// SPDX-License-Identifier: Apache-2.0
#include "cxrt/app/batch.hpp"

#include <algorithm>
#include <atomic>
#include <iostream>
#include <mutex>
#include <thread>

#include "cxrt/error.hpp"
#include "cxrt/ingestion/watcher.hpp"
#include "cxrt/ingestion/work_queue.hpp"

namespace cxrt::app {

namespace fs = std::filesystem;

void RunSummary::add(const CaseReport& r) {
  ++cases;
  if (r.status == "quarantined") {
    ++counts.quarantined;
  } else if (r.status == "error" || !r.outcome) {
    ++counts.errors;
  } else if (r.outcome->decision == triage::Decision::abstain) {
    ++counts.abstained;
  } else if (r.outcome->final_label == Label::positive) {
    ++counts.accepted_pos;
  } else {
    ++counts.accepted_neg;
  }
  mean_total_ms += r.latency.total_ms;
  mean_adapter_ms += r.latency.adapter_ms;
  mean_orchestration_ms += r.latency.orchestration_ms;
  reports.push_back(r);
}

void RunSummary::finish() {
  if (cases > 0) {
    mean_total_ms /= cases;
    mean_adapter_ms /= cases;
    mean_orchestration_ms /= cases;
  }
}

nlohmann::ordered_json RunSummary::to_json() const {
  return {{"cases", cases},
          {"counts", counts.to_json()},
          {"mean_total_ms", mean_total_ms},
          {"mean_adapter_ms", mean_adapter_ms},
          {"mean_orchestration_ms", mean_orchestration_ms},
          {"failures", failures}};
}

namespace {

class Collector {
 public:
  explicit Collector(const CaseCallback& cb) : cb_(cb) {}

  void report(std::size_t index, CaseReport r) {
    std::lock_guard lock(mutex_);
    if (cb_) cb_(r);
    done_.emplace_back(index, std::move(r));
  }
  void failure(std::string what) {
    std::lock_guard lock(mutex_);
    std::cerr << "cxrt: " << what << '\n';
    failures_.push_back(std::move(what));
  }
  RunSummary summary() {
    std::sort(done_.begin(), done_.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    RunSummary s;
    for (const auto& [i, r] : done_) s.add(r);
    s.failures = failures_;
    s.finish();
    return s;
  }

 private:
  const CaseCallback& cb_;
  std::mutex mutex_;
  std::vector<std::pair<std::size_t, CaseReport>> done_;
  std::vector<std::string> failures_;
};

template <typename Fn>
void guarded(Collector& out, const std::string& what, Fn&& fn) {
  try {
    fn();
  } catch (const std::exception& e) {
    out.failure(what + ": " + e.what());
  }
}

}  // namespace

RunSummary run_batch(const Engine& engine, const fs::path& input_dir, const CaseCallback& on_case) {
  if (!fs::is_directory(input_dir)) throw UsageError("input directory not found: " + input_dir.string());
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(input_dir)) {
    const std::string name = entry.path().filename().string();
    if (entry.is_regular_file() && !name.empty() && name[0] != '.') files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());

  Collector out(on_case);
  ingestion::CaseIdAllocator ids;
  std::atomic<std::size_t> next{0};
  const auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < files.size();) {
      guarded(out, files[i].filename().string(), [&] { out.report(i, engine.process_path(files[i], ids)); });
    }
  };
  const int n_workers = std::max(1, std::min<int>(engine.config().workers, static_cast<int>(files.size())));
  {
    std::vector<std::jthread> pool;
    for (int w = 1; w < n_workers; ++w) pool.emplace_back(work);
    work();
  }
  return out.summary();
}

RunSummary watch_folder(const Engine& engine, std::stop_token stop, const CaseCallback& on_case) {
  const auto& cfg = engine.config();
  if (cfg.input_dir.empty()) throw UsageError("paths.input is required for watching");
  ingestion::FolderWatcher watcher(cfg.input_dir, {std::chrono::milliseconds(cfg.poll_ms),
                                                   std::chrono::milliseconds(cfg.stability_ms)});
  ingestion::BoundedQueue<std::pair<std::size_t, ingestion::WatchEvent>> queue(
      static_cast<std::size_t>(std::max(4, 4 * cfg.workers)));
  Collector out(on_case);
  ingestion::CaseIdAllocator ids;

  std::vector<std::jthread> workers;
  for (int w = 0; w < cfg.workers; ++w) {
    workers.emplace_back([&] {
      while (auto item = queue.pop()) {
        auto& [index, event] = *item;
        if (auto* raw = std::get_if<ingestion::RawCase>(&event)) {
          guarded(out, raw->source_path.filename().string(), [&] { out.report(index, engine.process_raw(*raw, ids)); });
        } else {
          const auto& q = std::get<ingestion::QuarantineEvent>(event);
          guarded(out, q.path.filename().string(), [&] { out.report(index, engine.quarantine(q.path, q.reason, ids)); });
        }
      }
    });
  }

  std::size_t seq = 0;
  try {
    watcher.run(stop, [&](ingestion::WatchEvent e) { queue.push({seq++, std::move(e)}); });
  } catch (...) {
    queue.close();
    workers.clear();
    throw;
  }
  queue.close();
  workers.clear();  // joins after draining
  return out.summary();
}

}  // namespace cxrt::app
