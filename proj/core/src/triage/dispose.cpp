// SPDX-License-Identifier: Apache-2.0
#include "cxrt/triage/dispose.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstdio>
#include <cstring>
#include <mutex>

#include "cxrt/encoding.hpp"
#include "cxrt/error.hpp"

namespace cxrt::triage {

std::string_view folder_name(Destination d) noexcept {
  switch (d) {
    case Destination::positive: return "positive";
    case Destination::negative: return "negative";
    case Destination::human_review: return "Human_Intervention_Needed";
    case Destination::quarantine: return "quarantine";
    case Destination::holding: return "holding";
  }
  return "holding";
}

Destination destination_for(const TriageOutcome& outcome) noexcept {
  if (outcome.decision == Decision::abstain) return Destination::human_review;
  return outcome.final_label == Label::positive ? Destination::positive : Destination::negative;
}

OutputTree::OutputTree(fs::path root) : root_(std::move(root)) {}

void OutputTree::ensure() const {
  for (Destination d : {Destination::positive, Destination::negative, Destination::human_review,
                        Destination::quarantine, Destination::holding}) {
    fs::create_directories(folder(d));
  }
  fs::create_directories(traces());
}

namespace {

std::mutex& name_mutex() {
  static std::mutex m;
  return m;
}

void fsync_path(const fs::path& p) {
  const int fd = ::open(p.c_str(), O_RDONLY | O_CLOEXEC);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

}  // namespace

fs::path move_into(const fs::path& source, const fs::path& dir, const std::string& case_id) {
  fs::create_directories(dir);
  std::lock_guard lock(name_mutex());
  fs::path target = dir / source.filename();
  if (fs::exists(target)) {
    const std::string stem = source.stem().string() + "_" + case_id;
    target = dir / (stem + source.extension().string());
    for (int n = 2; fs::exists(target); ++n) {
      target = dir / (stem + "-" + std::to_string(n) + source.extension().string());
    }
  }
  if (::rename(source.c_str(), target.c_str()) == 0) return target;
  if (errno != EXDEV) {
    throw DataError("cannot move " + source.string() + " to " + target.string() + ": " + std::strerror(errno));
  }
  const fs::path partial = target.string() + ".partial";
  fs::copy_file(source, partial, fs::copy_options::overwrite_existing);
  fsync_path(partial);
  fs::rename(partial, target);
  fsync_path(dir);
  fs::remove(source);
  return target;
}

Disposal dispose(const fs::path& source, const std::string& case_id, const TriageOutcome& outcome,
                 const OutputTree& tree) {
  Disposal d;
  d.destination = move_into(source, tree.folder(destination_for(outcome)), case_id);
  if (outcome.decision == Decision::abstain) {
    const fs::path sidecar = d.destination.string() + ".suggestion.txt";
    const std::string line = std::string(to_string(outcome.suggested_label.value_or(outcome.final_label))) + "\t" +
                             std::string(policy::to_string(outcome.decided_by)) + "\t" + outcome.rationale + "\n";
    write_file_atomic(sidecar.string(), line);
    d.sidecar = sidecar;
  }
  return d;
}

}  // namespace cxrt::triage
