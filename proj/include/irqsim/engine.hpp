#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <queue>
#include <unordered_map>
#include <vector>

#include "irqsim/error.hpp"
#include "irqsim/rng.hpp"
#include "irqsim/time.hpp"

namespace irqsim {

enum class EventKind : std::uint8_t {
  irq_assert,
  task_step_done,
  mask_end,
  timer_fire,
  custom,
};

struct EventHandle {
  std::uint64_t seq = 0;  // 0 is the null handle
  explicit operator bool() const { return seq != 0; }
};

struct FiredEvent {
  EventKind kind;
  Timestamp due;
  std::uint64_t seq;
};

// Deterministic discrete-event core: a virtual clock and a queue totally
// ordered by (due, insertion sequence). All other components advance time
// exclusively by scheduling events here.
class Engine {
 public:
  explicit Engine(std::uint64_t seed) : rngs_(seed) {}

  Engine(const Engine&) = delete;
  Engine& operator=(const Engine&) = delete;

  Timestamp now() const { return now_; }
  RngPool& rngs() { return rngs_; }

  EventHandle schedule(Timestamp due, EventKind kind, std::function<void()> fn);
  EventHandle schedule_in(Duration delay, EventKind kind, std::function<void()> fn) {
    return schedule(now_ + delay, kind, std::move(fn));
  }

  // True if the event was still pending and is now removed.
  bool cancel(EventHandle h);

  // Pops the least (due, seq) event, advances the clock to its due time, runs
  // its callback, and returns its descriptor. Empty queue: returns nullopt and
  // leaves the clock untouched.
  std::optional<FiredEvent> step();

  bool idle() const { return pending_.empty(); }
  std::size_t pending_count() const { return pending_.size(); }
  std::uint64_t fired_count() const { return fired_; }

  // Drains the queue. Intended for self-contained test setups.
  void run() {
    while (step()) {
    }
  }

 private:
  struct Pending {
    Timestamp due;
    EventKind kind;
    std::function<void()> fn;
  };
  struct HeapItem {
    std::uint64_t due_ns;
    std::uint64_t seq;
    bool operator>(const HeapItem& o) const {
      return due_ns != o.due_ns ? due_ns > o.due_ns : seq > o.seq;
    }
  };

  Timestamp now_{};
  std::uint64_t next_seq_ = 1;
  std::uint64_t fired_ = 0;
  RngPool rngs_;
  std::unordered_map<std::uint64_t, Pending> pending_;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<HeapItem>> heap_;
};

}  // namespace irqsim
