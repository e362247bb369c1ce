#include "irqsim/harness.hpp"

#include <memory>
#include <utility>

namespace irqsim {

namespace {

DistributionSpec ctx_for(const ArchCfg& arch, const std::string& name) {
  auto it = arch.context.find(name);
  if (it != arch.context.end()) return it->second;
  it = arch.context.find("default");
  if (it != arch.context.end()) return it->second;
  return DistributionSpec::constant(Duration{});
}

}  // namespace

class TestRig::MtBehavior final : public Behavior {
 public:
  explicit MtBehavior(TestRig* rig) : rig_(rig) {}

  std::optional<TaskStep> next() override {
    if (!first_) rig_->on_mt_cycle();
    first_ = false;
    if (rig_->done()) return std::nullopt;
    return StepWait{rig_->sem_};
  }

 private:
  TestRig* rig_;
  bool first_ = true;
};

TestRig::TestRig(Engine& eng, Machine& machine, Kernel& kernel, TraceSink& trace,
                 const MeasureConfig& cfg, DistributionSpec timer_body,
                 DistributionSpec mt_ctx)
    : eng_(eng), machine_(machine), kernel_(kernel), trace_(trace), cfg_(cfg) {
  if (cfg_.interrupt_count == 0)
    throw Error(Errc::config_error, "interrupt_count must be at least 1");
  if (cfg_.rate_hz == 0) throw Error(Errc::config_error, "rate_hz must be at least 1");
  period_ = Duration{1000000000ull / cfg_.rate_hz};
  if (period_.ns == 0)
    throw Error(Errc::config_error, "rate_hz exceeds one interrupt per nanosecond");

  machine_.add_line(IrqLineConfig{kTimerLine, cfg_.timer_hw_priority, Trigger::edge,
                                  Routing::rt});
  IsrProgram isr;
  isr.body = std::move(timer_body);
  isr.on_entry = [this](Duration lat) { on_timer_entry(lat); };
  isr.action = [this] { on_timer_action(); };
  machine_.connect_isr(kTimerLine, std::move(isr));

  sem_ = kernel_.create_semaphore("measurement", 0);
  TaskConfig mt_cfg;
  mt_cfg.name = "mt";
  mt_cfg.priority = kMtPriority;
  mt_cfg.context_cost = std::move(mt_ctx);
  mt_ = kernel_.create_task(std::move(mt_cfg), std::make_unique<MtBehavior>(this));
}

void TestRig::arm() {
  base_ = eng_.now();
  eng_.schedule(base_ + period_, EventKind::timer_fire, [this] { fire(1); });
}

void TestRig::fire(std::uint64_t k) {
  machine_.raise_irq(kTimerLine);
  if (k < cfg_.interrupt_count) {
    eng_.schedule(base_ + period_ * (k + 1), EventKind::timer_fire,
                  [this, k] { fire(k + 1); });
  }
}

void TestRig::on_timer_entry(Duration latency) {
  entries_++;
  pending_latency_ = latency;
}

void TestRig::on_timer_action() {
  PendingCycle c;
  c.n = entries_;
  c.irq_latency = pending_latency_;
  c.released = eng_.now();
  // The previous cycle's sample should have been consumed and the task
  // re-blocked by now; if not, the system fell behind the interrupt rate.
  c.overrun = !kernel_.task_blocked_on(mt_, sem_);
  fifo_.push_back(c);
  kernel_.sem_release(sem_, true);
}

void TestRig::on_mt_cycle() {
  if (fifo_.empty())
    throw Error(Errc::invalid_state, "measurement task woke with no released cycle");
  PendingCycle c = fifo_.front();
  fifo_.pop_front();
  LatencySample s;
  s.n = c.n;
  s.irq_latency = c.irq_latency;
  s.cs_delay = eng_.now() - c.released;
  s.overrun = c.overrun;
  if (s.overrun) overruns_++;
  samples_.push_back(s);
  trace_.on(TraceRecord{eng_.now(), TraceKind::sample_emit,
                        static_cast<std::int64_t>(s.n),
                        static_cast<std::int64_t>(s.irq_latency.ns),
                        static_cast<std::int64_t>(s.cs_delay.ns)});
}

namespace {

// Self-rescheduling interrupt source for the flood load.
struct ArrivalChain {
  Engine& eng;
  Machine& machine;
  int line;
  DistributionSpec inter;
  Rng rng;

  ArrivalChain(Engine& e, Machine& m, int ln, DistributionSpec d, Rng r)
      : eng(e), machine(m), line(ln), inter(std::move(d)), rng(r) {
    inter.validate();
  }

  void schedule_next() {
    eng.schedule_in(inter.sample(rng), EventKind::irq_assert, [this] {
      machine.raise_irq(line);
      schedule_next();
    });
  }
};

constexpr int kNetLine = 1;
constexpr int kSerialLine = 2;

}  // namespace

void validate_scenario(const Scenario& sc) {
  if (sc.measure.interrupt_count == 0)
    throw Error(Errc::config_error, "interrupt_count must be positive");
  const LoadSpec& load = sc.load;
  if (load.net_storm.enabled) {
    if (load.net_storm.hw_priority >= sc.measure.timer_hw_priority)
      throw Error(Errc::config_error,
                  "net_storm hw_priority must stay below the timer's");
    if (load.net_storm.worker_priority >= TestRig::kMtPriority)
      throw Error(Errc::config_error,
                  "net_storm worker_priority must stay below the measurement task's");
  }
  if (load.serial_copier.enabled) {
    if (load.serial_copier.hw_priority >= sc.measure.timer_hw_priority)
      throw Error(Errc::config_error,
                  "serial_copier hw_priority must stay below the timer's");
    if (load.serial_copier.priority >= TestRig::kMtPriority)
      throw Error(Errc::config_error,
                  "serial_copier priority must stay below the measurement task's");
  }
  if (sc.arch.variant == ArchVariant::virtualized) {
    if (load.any() && !sc.arch.hard_mask_sections.count(Subsystem::rt_core))
      throw Error(Errc::config_error,
                  "virtualized load requires an rt-core hard_mask_sections entry");
    for (const auto& [sys, spec] : sc.arch.hard_mask_sections)
      if (sys != Subsystem::rt_core)
        throw Error(Errc::config_error,
                    std::string("virtualized hard_mask_sections allows only rt-core, got ") +
                        subsystem_name(sys));
  } else {
    for (const auto& [sys, spec] : sc.arch.hard_mask_sections)
      if (sys != Subsystem::kernel_sync)
        throw Error(Errc::config_error,
                    std::string("direct hard_mask_sections allows only kernel-sync, got ") +
                        subsystem_name(sys));
    if (sc.arch.soft_toggle.ns != 0 || sc.arch.pending_mgmt.ns != 0)
      throw Error(Errc::config_error,
                  "soft_toggle and pending_mgmt require the virtualized architecture");
  }
  bool any_section = !sc.arch.hard_mask_sections.empty() ||
                     (sc.load.net_storm.enabled || sc.load.serial_copier.enabled);
  if (any_section && !sc.arch.mask_section_cap)
    throw Error(Errc::config_error,
                "mask_section_cap is required when masked sections are configured");
}

namespace {

MachineCosts build_costs(const Scenario& sc) {
  MachineCosts mc;
  mc.isr_entry = sc.arch.isr_entry;
  mc.section_cap = sc.arch.mask_section_cap;
  mc.soft_toggle = sc.arch.soft_toggle;
  mc.pending_mgmt = sc.arch.pending_mgmt;
  for (const auto& [sys, spec] : sc.arch.hard_mask_sections) mc.sections[sys] = spec;
  if (sc.arch.variant == ArchVariant::direct) {
    // Under direct dispatch the driver mask sections run inside the ISRs.
    if (sc.load.net_storm.enabled)
      mc.sections[Subsystem::net_driver] = sc.load.net_storm.mask_section;
    if (sc.load.serial_copier.enabled)
      mc.sections[Subsystem::serial_driver] = sc.load.serial_copier.mask_section;
  }
  return mc;
}

void build_direct_loads(const Scenario& sc, Machine& machine, Kernel& kernel) {
  if (sc.load.net_storm.enabled) {
    const NetStormSpec& net = sc.load.net_storm;
    machine.add_line(IrqLineConfig{kNetLine, net.hw_priority, Trigger::edge, Routing::rt});
    SemId net_sem = kernel.create_semaphore("net_work", 0);
    IsrProgram isr;
    isr.body = net.isr_body;
    isr.section = Subsystem::net_driver;
    isr.action = [&kernel, net_sem] { kernel.sem_release(net_sem, true); };
    machine.connect_isr(kNetLine, std::move(isr));

    std::vector<TaskStep> steps;
    steps.push_back(StepWait{net_sem});
    steps.push_back(StepCompute{net.kernel_work});
    if (sc.arch.hard_mask_sections.count(Subsystem::kernel_sync))
      steps.push_back(StepMaskSection{Subsystem::kernel_sync});
    TaskConfig cfg;
    cfg.name = "net_worker";
    cfg.priority = net.worker_priority;
    cfg.context_cost = ctx_for(sc.arch, "net_worker");
    kernel.create_task(std::move(cfg),
                       std::make_unique<ScriptBehavior>(std::move(steps), true));
  }
  if (sc.load.serial_copier.enabled) {
    const SerialCopierSpec& ser = sc.load.serial_copier;
    machine.add_line(
        IrqLineConfig{kSerialLine, ser.hw_priority, Trigger::edge, Routing::rt});
    SemId done = kernel.create_semaphore("serial_done", 0);
    IsrProgram isr;
    isr.body = ser.serial_irq;
    isr.section = Subsystem::serial_driver;
    isr.action = [&kernel, done] { kernel.sem_release(done, true); };
    machine.connect_isr(kSerialLine, std::move(isr));

    std::vector<TaskStep> steps;
    steps.push_back(StepCompute{ser.chunk_work});
    steps.push_back(StepIoTrigger{kSerialLine, ser.device_delay});
    steps.push_back(StepWait{done});
    TaskConfig cfg;
    cfg.name = "serial_copier";
    cfg.priority = ser.priority;
    cfg.context_cost = ctx_for(sc.arch, "serial_copier");
    kernel.create_task(std::move(cfg),
                       std::make_unique<ScriptBehavior>(std::move(steps), true));
  }
}

void build_virtualized_loads(const Scenario& sc, Machine& machine, Kernel& kernel) {
  std::vector<TaskStep> script;
  if (sc.load.net_storm.enabled) {
    const NetStormSpec& net = sc.load.net_storm;
    machine.add_line(
        IrqLineConfig{kNetLine, net.hw_priority, Trigger::edge, Routing::guest});
    kernel.set_guest_body(kNetLine, {net.isr_body, net.kernel_work});
  }
  if (sc.load.serial_copier.enabled) {
    const SerialCopierSpec& ser = sc.load.serial_copier;
    machine.add_line(
        IrqLineConfig{kSerialLine, ser.hw_priority, Trigger::edge, Routing::guest});
    kernel.set_guest_body(kSerialLine, {ser.serial_irq});
    // The copier's driver section becomes guest-side work under a soft mask:
    // the guest protects its own critical region the only way it can.
    script.push_back(StepCompute{ser.chunk_work});
    script.push_back(StepSoftDisable{kSerialLine});
    script.push_back(StepCompute{ser.mask_section});
    script.push_back(StepIoTrigger{kSerialLine, ser.device_delay});
    script.push_back(StepSoftEnable{kSerialLine});
  }
  if (sc.load.net_storm.enabled) {
    const NetStormSpec& net = sc.load.net_storm;
    script.push_back(StepSoftDisable{kNetLine});
    script.push_back(StepCompute{net.mask_section});
    script.push_back(StepSoftEnable{kNetLine});
  }
  TaskConfig cfg;
  cfg.name = "guest";
  cfg.priority = 1;
  cfg.context_cost = ctx_for(sc.arch, "guest");
  kernel.create_guest_task(std::move(cfg),
                           std::make_unique<ScriptBehavior>(std::move(script), true));
}

}  // namespace

RawRun run_measure(const Scenario& sc, TraceSink* sink) {
  validate_scenario(sc);
  TraceSink& trace = sink ? *sink : null_trace();
  Engine eng(sc.measure.seed);
  Machine machine(eng, trace, sc.arch.variant, build_costs(sc));
  Kernel kernel(eng, machine, trace, sc.arch.decide_cost);
  kernel.set_idle_context(ctx_for(sc.arch, "idle"));
  TestRig rig(eng, machine, kernel, trace, sc.measure, sc.arch.timer_isr_body,
              ctx_for(sc.arch, "mt"));

  std::unique_ptr<ArrivalChain> net_arrivals;
  if (sc.arch.variant == ArchVariant::direct) {
    build_direct_loads(sc, machine, kernel);
  } else {
    build_virtualized_loads(sc, machine, kernel);
  }
  if (sc.load.net_storm.enabled) {
    net_arrivals = std::make_unique<ArrivalChain>(
        eng, machine, kNetLine, sc.load.net_storm.inter_arrival,
        eng.rngs().stream("load.net.arrival"));
    net_arrivals->schedule_next();
  }

  kernel.start();
  rig.arm();
  while (!rig.done()) {
    if (!eng.step())
      throw Error(Errc::invalid_state, "event queue drained before measurement completed");
  }

  RawRun out;
  out.samples = rig.samples();
  out.overrun_count = rig.overruns();
  out.seed = sc.measure.seed;
  out.end_time = eng.now();
  if (out.samples.size() != sc.measure.interrupt_count)
    throw Error(Errc::invalid_state, "measurement cycle count mismatch");

  Duration floor = sc.arch.isr_entry.min_support();
  std::optional<Duration> bound;
  if (sc.arch.variant == ArchVariant::direct && sc.arch.mask_section_cap) {
    if (auto entry_max = sc.arch.isr_entry.max_support())
      bound = *sc.arch.mask_section_cap + *entry_max;
  }
  for (const LatencySample& s : out.samples) {
    if (s.irq_latency < floor)
      throw Error(Errc::invalid_state, "interrupt latency fell below the vectoring floor");
    // An overrun cycle may queue behind the timer's own service, which the
    // masked-section bound does not cover; every other cycle must obey it.
    if (bound && !s.overrun && s.irq_latency > *bound)
      throw Error(Errc::invalid_state,
                  "direct-dispatch latency exceeded the masked-section hard bound");
  }
  out.hard_bound = bound;
  return out;
}

}  // namespace irqsim
