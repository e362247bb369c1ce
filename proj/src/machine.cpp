#include "irqsim/machine.hpp"

#include <climits>
#include <string>

namespace irqsim {

namespace {
constexpr std::size_t npos = static_cast<std::size_t>(-1);
}

const char* subsystem_name(Subsystem s) {
  switch (s) {
    case Subsystem::rt_core: return "rt-core";
    case Subsystem::net_driver: return "net-driver";
    case Subsystem::serial_driver: return "serial-driver";
    case Subsystem::kernel_sync: return "kernel-sync";
  }
  return "unknown";
}

const char* arch_name(ArchVariant v) {
  return v == ArchVariant::direct ? "direct" : "virtualized";
}

Machine::Machine(Engine& eng, TraceSink& trace, ArchVariant arch, MachineCosts costs)
    : eng_(eng), trace_(trace), arch_(arch), costs_(std::move(costs)) {
  costs_.isr_entry.validate();
  if (costs_.section_cap && costs_.section_cap->ns == 0)
    throw Error(Errc::bad_value, "mask section cap must be positive");
  for (const auto& [sys, spec] : costs_.sections) {
    std::string stream = std::string("machine.section.") + subsystem_name(sys);
    section_samplers_.emplace(sys, Sampler{spec, eng_.rngs().stream(stream)});
  }
}

void Machine::add_line(const IrqLineConfig& cfg) {
  if (lines_.count(cfg.id))
    throw Error(Errc::bad_value, "duplicate irq line id " + std::to_string(cfg.id));
  LineState l;
  l.cfg = cfg;
  l.entry = Sampler{costs_.isr_entry,
                    eng_.rngs().stream("machine.entry." + std::to_string(cfg.id))};
  lines_.emplace(cfg.id, std::move(l));
}

void Machine::connect_isr(int id, IsrProgram program) {
  LineState& l = line(id);
  program.body.validate();
  l.body = Sampler{program.body,
                   eng_.rngs().stream("machine.body." + std::to_string(id))};
  l.isr = std::move(program);
  l.has_handler = true;
}

Machine::LineState& Machine::line(int id) {
  auto it = lines_.find(id);
  if (it == lines_.end())
    throw Error(Errc::unknown_line, "irq line " + std::to_string(id));
  return it->second;
}

const Machine::LineState& Machine::line(int id) const {
  auto it = lines_.find(id);
  if (it == lines_.end())
    throw Error(Errc::unknown_line, "irq line " + std::to_string(id));
  return it->second;
}

const IrqLineConfig& Machine::line_config(int id) const { return line(id).cfg; }

bool Machine::isr_active() const { return !frames_.empty(); }

int Machine::top_isr_priority() const {
  for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
    if (!it->dispatcher) return line(it->line).cfg.hw_priority;
  return INT_MIN;
}

std::uint64_t Machine::raises(int id) const { return line(id).raise_count; }

std::uint64_t Machine::soft_pending(int id) const { return line(id).soft_pending; }

bool Machine::soft_disabled(int id) const { return line(id).soft_disabled; }

Duration Machine::draw_section(Subsystem s) {
  auto it = section_samplers_.find(s);
  if (it == section_samplers_.end())
    throw Error(Errc::invalid_state,
                std::string("no section distribution configured for ") + subsystem_name(s));
  Duration d = it->second.draw();
  if (costs_.section_cap && d > *costs_.section_cap) d = *costs_.section_cap;
  return d;
}

void Machine::raise_irq(int id) {
  LineState& l = line(id);
  l.raise_count++;
  emit(TraceKind::irq_raise, id);
  if (l.cfg.trigger == Trigger::level_coalescing && l.level_outstanding) {
    emit(TraceKind::irq_coalesced, id);
    return;
  }
  if (l.cfg.trigger == Trigger::level_coalescing) l.level_outstanding = true;

  if (arch_ == ArchVariant::virtualized && l.cfg.routing == Routing::guest) {
    // Every guest-routed arrival costs the core one masked bookkeeping unit,
    // whatever the guest's soft-mask state; the state only decides the
    // disposition (pend vs deliver) when the unit completes.
    backlog_.push_back(DispatchUnit{id, eng_.now(), draw_section(Subsystem::rt_core),
                                    unit_seq_++});
  } else {
    l.assert_fifo.push_back(eng_.now());
  }
  maybe_dispatch();
}

void Machine::poke() { maybe_dispatch(); }

Machine::LineState* Machine::best_pending_line(int floor_prio) {
  LineState* best = nullptr;
  for (auto& [id, l] : lines_) {
    if (l.assert_fifo.empty()) continue;
    if (l.cfg.hw_priority <= floor_prio) continue;
    if (!best) {
      best = &l;
      continue;
    }
    if (l.cfg.hw_priority != best->cfg.hw_priority) {
      if (l.cfg.hw_priority > best->cfg.hw_priority) best = &l;
    } else if (l.assert_fifo.front() < best->assert_fifo.front()) {
      best = &l;  // equal priority: earliest assert first, then lowest id
    }
  }
  return best;
}

std::size_t Machine::best_backlog_unit(int floor_prio) const {
  std::size_t best = npos;
  for (std::size_t i = 0; i < backlog_.size(); ++i) {
    const DispatchUnit& u = backlog_[i];
    int prio = line(u.line).cfg.hw_priority;
    if (prio <= floor_prio) continue;
    if (best == npos) {
      best = i;
      continue;
    }
    const DispatchUnit& b = backlog_[best];
    int bprio = line(b.line).cfg.hw_priority;
    if (prio != bprio) {
      if (prio > bprio) best = i;
    } else if (u.assert_t < b.assert_t || (u.assert_t == b.assert_t && u.seq < b.seq)) {
      best = i;
    }
  }
  return best;
}

void Machine::maybe_dispatch() {
  if (masked()) return;
  int floor = top_isr_priority();
  LineState* rt = best_pending_line(floor);
  std::size_t unit = best_backlog_unit(floor);
  if (rt && (unit == npos ||
             rt->cfg.hw_priority >= line(backlog_[unit].line).cfg.hw_priority)) {
    start_isr(*rt);
  } else if (unit != npos) {
    start_sweep();
  }
}

void Machine::start_isr(LineState& l) {
  if (!l.has_handler)
    throw Error(Errc::no_handler, "irq line " + std::to_string(l.cfg.id));
  Frame f;
  f.line = l.cfg.id;
  f.phase = 0;
  f.assert_t = l.assert_fifo.front();
  l.assert_fifo.pop_front();
  f.remaining = l.entry.draw();
  push_frame(std::move(f));
}

void Machine::start_sweep() {
  // The sweep runs entirely inside one hard-masked section and keeps taking
  // eligible backlog units (including ones that arrive mid-sweep) until none
  // remain; that chaining is what makes a burst of guest interrupts stretch
  // the masked interval past any single unit's length.
  int floor = top_isr_priority();
  std::size_t idx = best_backlog_unit(floor);
  Frame f;
  f.dispatcher = true;
  f.unit = backlog_[idx];
  backlog_.erase(backlog_.begin() + static_cast<std::ptrdiff_t>(idx));
  f.remaining = f.unit->work;
  f.mask_token = enter_hard_mask(Subsystem::rt_core);
  push_frame(std::move(f));
}

bool Machine::sweep_take_next(Frame& f) {
  int floor = INT_MIN;
  for (std::size_t i = frames_.size() - 1; i-- > 0;) {
    if (!frames_[i].dispatcher) {
      floor = line(frames_[i].line).cfg.hw_priority;
      break;
    }
  }
  std::size_t idx = best_backlog_unit(floor);
  if (idx == npos) return false;
  f.unit = backlog_[idx];
  backlog_.erase(backlog_.begin() + static_cast<std::ptrdiff_t>(idx));
  f.remaining = f.unit->work;
  return true;
}

void Machine::push_frame(Frame f) {
  bool was_empty = frames_.empty();
  if (!was_empty) suspend_top();
  frames_.push_back(std::move(f));
  schedule_top();
  if (was_empty && kernel_) kernel_->cpu_stolen();
}

void Machine::schedule_top() {
  Frame& t = frames_.back();
  EventKind kind =
      (t.dispatcher || t.phase == 2) ? EventKind::mask_end : EventKind::custom;
  t.end = eng_.now() + t.remaining;
  t.ev = eng_.schedule_in(t.remaining, kind, [this] { on_frame_event(); });
}

void Machine::suspend_top() {
  Frame& t = frames_.back();
  if (!t.ev) return;
  eng_.cancel(t.ev);
  t.ev = EventHandle{};
  t.remaining = t.end - eng_.now();
}

void Machine::on_frame_event() {
  Frame& f = frames_.back();
  f.ev = EventHandle{};

  if (f.dispatcher) {
    dispose_unit(*f.unit);
    if (sweep_take_next(f)) {
      schedule_top();
      return;
    }
    int token = f.mask_token;
    frames_.pop_back();
    exit_hard_mask(token);
    settle();
    return;
  }

  LineState& l = line(f.line);
  switch (f.phase) {
    case 0: {  // vectoring complete: handler's first instruction runs now
      Duration latency = eng_.now() - f.assert_t;
      emit(TraceKind::isr_enter, f.line, static_cast<std::int64_t>(latency.ns));
      l.level_outstanding = false;
      if (l.isr.on_entry) l.isr.on_entry(latency);
      f.phase = 1;
      f.remaining = l.body.draw();
      schedule_top();
      return;
    }
    case 1: {  // body complete
      if (l.isr.section) {
        f.phase = 2;
        f.mask_token = enter_hard_mask(*l.isr.section);
        f.remaining = draw_section(*l.isr.section);
        schedule_top();
        return;
      }
      finish_isr();
      return;
    }
    case 2: {  // masked section complete
      exit_hard_mask(f.mask_token);
      finish_isr();
      return;
    }
  }
}

void Machine::finish_isr() {
  Frame f = frames_.back();
  emit(TraceKind::isr_exit, f.line);
  auto action = line(f.line).isr.action;
  frames_.pop_back();
  if (action) action();
  settle();
}

void Machine::settle() {
  std::size_t before = frames_.size();
  maybe_dispatch();
  if (frames_.size() != before) return;  // deferred work took the CPU
  if (frames_.empty()) {
    if (kernel_) kernel_->cpu_released();
    return;
  }
  schedule_top();  // resume the suspended frame below
}

void Machine::dispose_unit(const DispatchUnit& u) {
  LineState& l = line(u.line);
  if (l.soft_disabled) {
    l.soft_pending =
        l.cfg.trigger == Trigger::level_coalescing ? 1 : l.soft_pending + 1;
    emit(TraceKind::guest_pend, u.line, static_cast<std::int64_t>(l.soft_pending));
  } else {
    emit(TraceKind::guest_deliver, u.line, 0);
    if (kernel_) kernel_->guest_deliver(u.line, false);
  }
}

int Machine::enter_hard_mask(Subsystem s) {
  if (mask_depth_ > 0 && s != mask_subsys_)
    throw Error(Errc::invalid_state,
                std::string("masked section for ") + subsystem_name(s) +
                    " opened inside section for " + subsystem_name(mask_subsys_));
  if (mask_depth_ == 0) {
    mask_subsys_ = s;
    emit(TraceKind::mask_enter, static_cast<std::int64_t>(s));
  }
  mask_depth_++;
  int token = next_mask_token_++;
  mask_tokens_.push_back(token);
  return token;
}

void Machine::exit_hard_mask(int token) {
  if (mask_tokens_.empty() || mask_tokens_.back() != token)
    throw Error(Errc::invalid_state, "mask section release out of order");
  mask_tokens_.pop_back();
  mask_depth_--;
  if (mask_depth_ == 0) emit(TraceKind::mask_exit, static_cast<std::int64_t>(mask_subsys_));
}

void Machine::soft_disable(int id) {
  if (arch_ != ArchVariant::virtualized)
    throw Error(Errc::arch_mismatch, "soft masking requires the virtualized architecture");
  LineState& l = line(id);
  if (kernel_ && !kernel_->in_guest_context())
    throw Error(Errc::invalid_state, "soft mask toggled outside guest context");
  l.soft_disabled = true;
  emit(TraceKind::soft_disable, id);
}

void Machine::soft_enable(int id) {
  if (arch_ != ArchVariant::virtualized)
    throw Error(Errc::arch_mismatch, "soft masking requires the virtualized architecture");
  LineState& l = line(id);
  if (kernel_ && !kernel_->in_guest_context())
    throw Error(Errc::invalid_state, "soft mask toggled outside guest context");
  l.soft_disabled = false;
  emit(TraceKind::soft_enable, id);
  std::uint64_t drain = l.soft_pending;
  l.soft_pending = 0;
  for (std::uint64_t i = 0; i < drain; ++i) {
    emit(TraceKind::guest_deliver, id, 1);
    if (kernel_) kernel_->guest_deliver(id, true);
  }
}

void Machine::note_guest_handler_start(int id) { line(id).level_outstanding = false; }

}  // namespace irqsim
