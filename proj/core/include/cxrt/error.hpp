// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace cxrt {

/// Broad error classes; each maps onto a CLI exit code.
enum class ErrorKind { usage, data, adapter, internal };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Invalid or degenerate input data (bad image, empty mask, singular model...).
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::data, what) {}
};

/// An external adapter (scorer, segmenter, chat endpoint) failed or was unreachable.
class AdapterError : public Error {
 public:
  explicit AdapterError(const std::string& what) : Error(ErrorKind::adapter, what) {}
};

class UsageError : public Error {
 public:
  explicit UsageError(const std::string& what) : Error(ErrorKind::usage, what) {}
};

/// 0 success, 1 usage, 2 data error, 3 adapter error.
constexpr int exit_code(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::usage: return 1;
    case ErrorKind::data: return 2;
    case ErrorKind::adapter: return 3;
    case ErrorKind::internal: return 2;
  }
  return 2;
}

}  // namespace cxrt
