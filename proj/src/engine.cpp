#include "irqsim/engine.hpp"

namespace irqsim {

EventHandle Engine::schedule(Timestamp due, EventKind kind, std::function<void()> fn) {
  if (due < now_)
    throw Error(Errc::past_due, "event due " + std::to_string(due.ns) +
                                    "ns is before clock " + std::to_string(now_.ns) + "ns");
  std::uint64_t seq = next_seq_++;
  pending_.emplace(seq, Pending{due, kind, std::move(fn)});
  heap_.push(HeapItem{due.ns, seq});
  return EventHandle{seq};
}

bool Engine::cancel(EventHandle h) {
  return pending_.erase(h.seq) > 0;  // heap entry is skipped lazily on pop
}

std::optional<FiredEvent> Engine::step() {
  while (!heap_.empty()) {
    HeapItem item = heap_.top();
    heap_.pop();
    auto it = pending_.find(item.seq);
    if (it == pending_.end()) continue;  // cancelled
    Pending ev = std::move(it->second);
    pending_.erase(it);
    now_ = ev.due;  // clock never moves backward: due >= now_ held at insert
    ++fired_;
    if (ev.fn) ev.fn();
    return FiredEvent{ev.kind, ev.due, item.seq};
  }
  return std::nullopt;
}

}  // namespace irqsim
