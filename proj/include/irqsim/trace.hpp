#pragma once

#include <cstdint>
#include <vector>

#include "irqsim/time.hpp"

namespace irqsim {

// One flat record type keeps trace capture cheap and the CSV export trivial.
// Field meaning by kind (unused fields are -1):
//   irq_raise            a=line
//   irq_coalesced        a=line
//   isr_enter            a=line, b=latency ns
//   isr_exit             a=line
//   mask_enter           a=subsystem
//   mask_exit            a=subsystem
//   task_run_begin       a=task
//   task_run_end         a=task
//   sem_release          a=sem, b=from_isr
//   sem_wake             a=sem, b=task
//   switch_begin         a=from task, b=to task
//   switch_end           a=from task, b=to task, c=total ns
//   guest_pend           a=line, b=pending count after
//   guest_deliver        a=line, b=was_pending
//   guest_handler_begin  a=line
//   guest_handler_end    a=line
//   soft_disable         a=line
//   soft_enable          a=line
//   sample_emit          a=sample index, b=irq latency ns, c=cs delay ns
enum class TraceKind : std::uint8_t {
  irq_raise,
  irq_coalesced,
  isr_enter,
  isr_exit,
  mask_enter,
  mask_exit,
  task_run_begin,
  task_run_end,
  sem_release,
  sem_wake,
  switch_begin,
  switch_end,
  guest_pend,
  guest_deliver,
  guest_handler_begin,
  guest_handler_end,
  soft_disable,
  soft_enable,
  sample_emit,
};

const char* trace_kind_name(TraceKind k);

struct TraceRecord {
  Timestamp t;
  TraceKind kind;
  std::int64_t a = -1;
  std::int64_t b = -1;
  std::int64_t c = -1;
};

class TraceSink {
 public:
  virtual ~TraceSink() = default;
  virtual void on(const TraceRecord&) {}
};

// The default sink: discards everything.
inline TraceSink& null_trace() {
  static TraceSink sink;
  return sink;
}

class TraceRecorder final : public TraceSink {
 public:
  void on(const TraceRecord& r) override { records.push_back(r); }

  std::vector<TraceRecord> records;

  std::vector<TraceRecord> of_kind(TraceKind k) const {
    std::vector<TraceRecord> out;
    for (const auto& r : records)
      if (r.kind == k) out.push_back(r);
    return out;
  }
};

}  // namespace irqsim
