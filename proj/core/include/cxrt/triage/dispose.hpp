// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "cxrt/triage/outcome.hpp"

namespace cxrt::triage {

namespace fs = std::filesystem;

enum class Destination { positive, negative, human_review, quarantine, holding };

/// positive, negative, Human_Intervention_Needed, quarantine, holding.
std::string_view folder_name(Destination d) noexcept;

Destination destination_for(const TriageOutcome& outcome) noexcept;

/// The output folder layout under one root.
class OutputTree {
 public:
  explicit OutputTree(fs::path root);
  /// Creates every folder (race-safe).
  void ensure() const;
  const fs::path& root() const noexcept { return root_; }
  fs::path folder(Destination d) const { return root_ / std::string(folder_name(d)); }
  fs::path traces() const { return root_ / "traces"; }
  fs::path artifacts(const std::string& case_id) const { return folder(Destination::positive) / "artifacts" / case_id; }

 private:
  fs::path root_;
};

/// Moves `source` into `dir` under its own name, or `<stem>_<case_id><ext>`
/// when taken. Rename when possible; across devices copy, fsync, delete.
fs::path move_into(const fs::path& source, const fs::path& dir, const std::string& case_id);

struct Disposal {
  fs::path destination;
  std::optional<fs::path> sidecar;
};

/// Moves the case file to its outcome folder; abstentions also get a
/// one-line `<file>.suggestion.txt` sidecar. Throws on filesystem errors.
Disposal dispose(const fs::path& source, const std::string& case_id, const TriageOutcome& outcome,
                 const OutputTree& tree);

}  // namespace cxrt::triage
