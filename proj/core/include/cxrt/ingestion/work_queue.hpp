// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>

#include "cxrt/error.hpp"
#include "cxrt/ingestion/case_record.hpp"

namespace cxrt::ingestion {

class QueueClosed : public Error {
 public:
  QueueClosed() : Error(ErrorKind::internal, "work queue is closed") {}
};

/// Bounded multi-producer/multi-consumer queue. `push` blocks while full.
template <typename T>
class BoundedQueue {
 public:
  explicit BoundedQueue(std::size_t capacity) : capacity_(capacity == 0 ? 1 : capacity) {}

  BoundedQueue(const BoundedQueue&) = delete;
  BoundedQueue& operator=(const BoundedQueue&) = delete;

  void push(T item) {
    std::unique_lock lock(mutex_);
    not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
    if (closed_) throw QueueClosed();
    items_.push_back(std::move(item));
    not_empty_.notify_one();
  }

  /// Non-blocking variant; false when full. Throws QueueClosed when closed.
  bool try_push(T& item) {
    std::lock_guard lock(mutex_);
    if (closed_) throw QueueClosed();
    if (items_.size() >= capacity_) return false;
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return true;
  }

  /// Blocks until an item is available; nullopt once closed and drained.
  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }
  std::size_t capacity() const noexcept { return capacity_; }
  bool closed() const {
    std::lock_guard lock(mutex_);
    return closed_;
  }

 private:
  const std::size_t capacity_;
  mutable std::mutex mutex_;
  std::condition_variable not_full_;
  std::condition_variable not_empty_;
  std::deque<T> items_;
  bool closed_ = false;
};

using CaseQueue = BoundedQueue<CaseHandle>;

inline void assign_and_enqueue(CaseRecord record, CaseQueue& queue) {
  queue.push(std::make_shared<const CaseRecord>(std::move(record)));
}

}  // namespace cxrt::ingestion
