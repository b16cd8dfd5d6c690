#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <type_traits>
#include <utility>

#include "stancegraph/core/error.hpp"
#include "stancegraph/core/graph.hpp"

namespace stancegraph {

/// Single-writer, multi-reader holder of the debate graph. Readers take an
/// immutable snapshot; a write copies the current graph, mutates the copy and
/// publishes it atomically. A pipeline run may hold the writer exclusively, in
/// which case every other write fails with BusyError.
class GraphStore {
 public:
  using Snapshot = std::shared_ptr<const DebateGraph>;

  explicit GraphStore(DebateGraph initial = {})
      : current_(std::make_shared<const DebateGraph>(std::move(initial))) {}

  Snapshot snapshot() const {
    std::shared_lock lock(publish_mutex_);
    return current_;
  }

  /// Applies `fn(DebateGraph&)` as one atomic write and returns its result.
  template <class Fn>
  decltype(auto) write(Fn&& fn) {
    std::unique_lock lock(write_mutex_);
    if (exclusive_.load()) throw BusyError("a pipeline run holds the writer");
    return apply(std::forward<Fn>(fn));
  }

  class ExclusiveLease {
   public:
    ExclusiveLease(ExclusiveLease&& other) noexcept : store_(std::exchange(other.store_, nullptr)) {}
    ExclusiveLease& operator=(ExclusiveLease&&) = delete;
    ~ExclusiveLease() {
      if (store_) store_->exclusive_.store(false);
    }

    template <class Fn>
    decltype(auto) write(Fn&& fn) {
      std::unique_lock lock(store_->write_mutex_);
      return store_->apply(std::forward<Fn>(fn));
    }

   private:
    friend class GraphStore;
    explicit ExclusiveLease(GraphStore* store) : store_(store) {}
    GraphStore* store_;
  };

  /// Claims the writer for a long pipeline run; throws BusyError if taken.
  ExclusiveLease acquire_exclusive() {
    std::unique_lock lock(write_mutex_);
    bool expected = false;
    if (!exclusive_.compare_exchange_strong(expected, true)) throw BusyError("a pipeline run holds the writer");
    return ExclusiveLease(this);
  }

  bool busy() const noexcept { return exclusive_.load(); }

 private:
  template <class Fn>
  decltype(auto) apply(Fn&& fn) {
    auto next = std::make_shared<DebateGraph>(*snapshot());
    if constexpr (std::is_void_v<decltype(fn(*next))>) {
      fn(*next);
      publish(std::move(next));
    } else {
      auto result = fn(*next);
      publish(std::move(next));
      return result;
    }
  }

  void publish(std::shared_ptr<DebateGraph> next) {
    std::unique_lock lock(publish_mutex_);
    current_ = std::move(next);
  }

  mutable std::shared_mutex publish_mutex_;
  std::mutex write_mutex_;
  std::atomic<bool> exclusive_{false};
  Snapshot current_;
};

}  // namespace stancegraph
