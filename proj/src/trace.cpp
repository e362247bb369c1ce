#include "irqsim/trace.hpp"

namespace irqsim {

const char* trace_kind_name(TraceKind k) {
  switch (k) {
    case TraceKind::irq_raise: return "irq_raise";
    case TraceKind::irq_coalesced: return "irq_coalesced";
    case TraceKind::isr_enter: return "isr_enter";
    case TraceKind::isr_exit: return "isr_exit";
    case TraceKind::mask_enter: return "mask_enter";
    case TraceKind::mask_exit: return "mask_exit";
    case TraceKind::task_run_begin: return "task_run_begin";
    case TraceKind::task_run_end: return "task_run_end";
    case TraceKind::sem_release: return "sem_release";
    case TraceKind::sem_wake: return "sem_wake";
    case TraceKind::switch_begin: return "switch_begin";
    case TraceKind::switch_end: return "switch_end";
    case TraceKind::guest_pend: return "guest_pend";
    case TraceKind::guest_deliver: return "guest_deliver";
    case TraceKind::guest_handler_begin: return "guest_handler_begin";
    case TraceKind::guest_handler_end: return "guest_handler_end";
    case TraceKind::soft_disable: return "soft_disable";
    case TraceKind::soft_enable: return "soft_enable";
    case TraceKind::sample_emit: return "sample_emit";
  }
  return "unknown";
}

}  // namespace irqsim
