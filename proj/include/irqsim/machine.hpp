#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irqsim/dist.hpp"
#include "irqsim/engine.hpp"
#include "irqsim/trace.hpp"

namespace irqsim {

enum class ArchVariant : std::uint8_t { direct, virtualized };
enum class Trigger : std::uint8_t { edge, level_coalescing };
enum class Routing : std::uint8_t { rt, guest };

// Named owners of interrupt-masked critical sections, so load generators can
// charge the subsystem they model and traces can attribute masked intervals.
enum class Subsystem : std::uint8_t { rt_core, net_driver, serial_driver, kernel_sync };

const char* subsystem_name(Subsystem s);
const char* arch_name(ArchVariant v);

struct IrqLineConfig {
  int id = 0;
  int hw_priority = 0;  // higher value preempts lower
  Trigger trigger = Trigger::edge;
  Routing routing = Routing::rt;  // consulted under virtualized dispatch only
};

// Handler attached to a directly-dispatched (or RT-routed) line. The body
// runs preemptible; the optional masked section models the driver's
// interrupt-disabled region; the action fires at handler completion.
struct IsrProgram {
  DistributionSpec body = DistributionSpec::constant(Duration{});
  std::optional<Subsystem> section;
  std::function<void(Duration)> on_entry;  // entry latency, measured assert -> first instruction
  std::function<void()> action;
};

struct MachineCosts {
  DistributionSpec isr_entry = DistributionSpec::constant(Duration{});
  std::map<Subsystem, DistributionSpec> sections;
  std::optional<Duration> section_cap;  // clamp applied to every section draw
  Duration soft_toggle{};               // virtualized: guest disable/enable hook cost
  Duration pending_mgmt{};              // virtualized: per drained pending IRQ
};

// Kernel-side callbacks the machine drives. The machine owns everything that
// runs above task level (ISRs, the virtualized dispatcher, masked sections);
// the kernel owns task execution and must freeze while the machine holds the
// CPU.
class KernelClient {
 public:
  virtual ~KernelClient() = default;
  virtual void cpu_stolen() = 0;
  virtual void cpu_released() = 0;
  virtual void guest_deliver(int line, bool was_pending) = 0;
  virtual bool in_guest_context() const = 0;
};

// Single-CPU interrupt model. Execution above task level is a stack of
// frames; only the top frame has a live completion event, lower frames hold
// their remaining work. Direct dispatch vectors eligible raises straight into
// ISR frames. Virtualized dispatch latches every guest-routed raise into a
// bookkeeping backlog the dispatcher sweeps inside a hard-masked section;
// RT-routed lines take the fast path and ignore guest soft-mask state.
class Machine {
 public:
  Machine(Engine& eng, TraceSink& trace, ArchVariant arch, MachineCosts costs);

  void add_line(const IrqLineConfig& cfg);
  void connect_isr(int line, IsrProgram program);
  void set_kernel(KernelClient* k) { kernel_ = k; }

  ArchVariant arch() const { return arch_; }
  const MachineCosts& costs() const { return costs_; }
  bool has_line(int id) const { return lines_.count(id) != 0; }
  const IrqLineConfig& line_config(int id) const;

  // Device-side assertion of a line at the current virtual time.
  void raise_irq(int line);

  // Dispatch anything deferred that is now eligible. Called by the kernel
  // right after it releases a task-context masked section so deferred raises
  // run before lower-priority code resumes.
  void poke();

  // Guest soft-mask hooks (virtualized only; ArchMismatch otherwise). The
  // toggle cost is charged by the caller in guest context; these commit the
  // state change. Enabling drains pending raises to the kernel's guest task.
  void soft_disable(int line);
  void soft_enable(int line);
  bool soft_disabled(int line) const;
  std::uint64_t soft_pending(int line) const;

  // Hard-masked critical sections. While any section is open no dispatch
  // occurs; deferred raises dispatch at release in (hw_priority, assert time)
  // order. Nesting within one subsystem extends the section; nesting across
  // subsystems is a caller bug.
  int enter_hard_mask(Subsystem s);
  void exit_hard_mask(int token);
  bool masked() const { return mask_depth_ > 0; }

  bool isr_active() const;
  int top_isr_priority() const;  // INT_MIN when no ISR frame is active

  // Section length draw for the given subsystem, clamped to the cap. Used by
  // the kernel for task-context sections so every masked interval in the
  // system obeys the same cap.
  Duration draw_section(Subsystem s);

  // Kernel notification: a guest handler execution for `line` begins now.
  void note_guest_handler_start(int line);

  std::uint64_t raises(int line) const;
  std::size_t backlog_depth() const { return backlog_.size(); }

 private:
  struct LineState {
    IrqLineConfig cfg;
    IsrProgram isr;
    bool has_handler = false;
    bool level_outstanding = false;
    std::deque<Timestamp> assert_fifo;  // RT path: raises awaiting dispatch
    std::uint64_t soft_pending = 0;
    bool soft_disabled = false;
    Sampler entry;
    Sampler body;
    std::uint64_t raise_count = 0;
  };

  struct DispatchUnit {
    int line;
    Timestamp assert_t;
    Duration work;
    std::uint64_t seq;
  };

  struct Frame {
    bool dispatcher = false;
    int line = -1;
    int phase = 0;  // ISR: 0 entry, 1 body, 2 section
    Timestamp assert_t{};
    int mask_token = -1;
    std::optional<DispatchUnit> unit;  // dispatcher: unit being bookkept
    Duration remaining{};
    Timestamp end{};  // due time of the live event, for suspend accounting
    EventHandle ev{};
  };

  LineState& line(int id);
  const LineState& line(int id) const;

  void maybe_dispatch();
  void start_isr(LineState& l);
  void start_sweep();
  bool sweep_take_next(Frame& f);
  void push_frame(Frame f);
  void schedule_top();
  void suspend_top();
  void on_frame_event();
  void finish_isr();
  void settle();
  void dispose_unit(const DispatchUnit& u);

  // Best pending RT line eligible above `floor_prio`; nullptr if none.
  LineState* best_pending_line(int floor_prio);
  // Index into backlog_ of the best eligible unit, or npos.
  std::size_t best_backlog_unit(int floor_prio) const;

  Sampler& section_sampler(Subsystem s);

  Engine& eng_;
  TraceSink& trace_;
  ArchVariant arch_;
  MachineCosts costs_;
  KernelClient* kernel_ = nullptr;

  std::map<int, LineState> lines_;
  std::vector<Frame> frames_;
  std::vector<DispatchUnit> backlog_;
  std::uint64_t unit_seq_ = 0;

  int mask_depth_ = 0;
  Subsystem mask_subsys_ = Subsystem::rt_core;
  std::vector<int> mask_tokens_;
  int next_mask_token_ = 1;

  std::map<Subsystem, Sampler> section_samplers_;

  void emit(TraceKind k, std::int64_t a = -1, std::int64_t b = -1, std::int64_t c = -1) {
    trace_.on(TraceRecord{eng_.now(), k, a, b, c});
  }
};

}  // namespace irqsim
