#include "irqsim/kernel.hpp"

#include <climits>

namespace irqsim {

Kernel::Kernel(Engine& eng, Machine& machine, TraceSink& trace, Duration decide_cost)
    : eng_(eng), machine_(machine), trace_(trace), decide_cost_(decide_cost) {
  Task idle;
  idle.id = 0;
  idle.cfg.name = "idle";
  idle.cfg.priority = INT_MIN;
  idle.state = TaskState::running;
  idle.ctx = Sampler{DistributionSpec::constant(Duration{}), Rng{0}};
  tasks_.emplace(0, std::move(idle));
  machine_.set_kernel(this);
}

void Kernel::set_idle_context(const DistributionSpec& spec) {
  Task& idle = tasks_.at(0);
  idle.cfg.context_cost = spec;
  idle.ctx = Sampler{spec, eng_.rngs().stream("kernel.ctx.idle")};
}

TaskId Kernel::create_task(TaskConfig cfg, std::unique_ptr<Behavior> behavior) {
  if (cfg.name.empty()) throw Error(Errc::bad_value, "task name must not be empty");
  for (const auto& [id, t] : tasks_)
    if (t.cfg.name == cfg.name)
      throw Error(Errc::bad_value, "duplicate task name " + cfg.name);
  if (guest_ != 0 && cfg.priority <= task(guest_).cfg.priority)
    throw Error(Errc::bad_value, "guest task must stay the lowest-priority task");
  TaskId id = next_task_id_++;
  Task t;
  t.id = id;
  t.cfg = std::move(cfg);
  t.behavior = std::move(behavior);
  t.state = TaskState::ready;
  t.ready_since = eng_.now();
  t.ready_seq = ++ready_seq_counter_;
  t.ctx = Sampler{t.cfg.context_cost, eng_.rngs().stream("kernel.ctx." + t.cfg.name)};
  t.compute_rng = eng_.rngs().stream("kernel.compute." + t.cfg.name);
  t.io_rng = eng_.rngs().stream("kernel.io." + t.cfg.name);
  tasks_.emplace(id, std::move(t));
  return id;
}

TaskId Kernel::create_guest_task(TaskConfig cfg, std::unique_ptr<Behavior> behavior) {
  if (machine_.arch() != ArchVariant::virtualized)
    throw Error(Errc::arch_mismatch, "guest task requires the virtualized architecture");
  if (guest_ != 0) throw Error(Errc::invalid_state, "guest task already exists");
  for (const auto& [id, t] : tasks_)
    if (id != 0 && t.cfg.priority <= cfg.priority)
      throw Error(Errc::bad_value, "guest task must stay the lowest-priority task");
  TaskId id = create_task(std::move(cfg), std::move(behavior));
  task(id).is_guest = true;
  guest_ = id;
  return id;
}

SemId Kernel::create_semaphore(std::string name, int initial) {
  if (initial < 0) throw Error(Errc::bad_value, "semaphore initial count must be >= 0");
  SemId id = next_sem_id_++;
  Semaphore s;
  s.id = id;
  s.name = std::move(name);
  s.count = initial;
  sems_.emplace(id, std::move(s));
  return id;
}

void Kernel::set_guest_body(int line, std::vector<DistributionSpec> specs) {
  for (const auto& s : specs) s.validate();
  GuestBody gb;
  gb.specs = std::move(specs);
  gb.rng = eng_.rngs().stream("kernel.guest_body." + std::to_string(line));
  guest_bodies_.insert_or_assign(line, std::move(gb));
}

Kernel::Task& Kernel::task(TaskId id) {
  auto it = tasks_.find(id);
  if (it == tasks_.end())
    throw Error(Errc::bad_value, "unknown task id " + std::to_string(id));
  return it->second;
}

const Kernel::Task& Kernel::task(TaskId id) const {
  auto it = tasks_.find(id);
  if (it == tasks_.end())
    throw Error(Errc::bad_value, "unknown task id " + std::to_string(id));
  return it->second;
}

Kernel::Semaphore& Kernel::sem(SemId id) {
  auto it = sems_.find(id);
  if (it == sems_.end())
    throw Error(Errc::unknown_semaphore, "semaphore " + std::to_string(id));
  return it->second;
}

const Kernel::Semaphore& Kernel::sem(SemId id) const {
  auto it = sems_.find(id);
  if (it == sems_.end())
    throw Error(Errc::unknown_semaphore, "semaphore " + std::to_string(id));
  return it->second;
}

TaskState Kernel::task_state(TaskId id) const { return task(id).state; }

bool Kernel::task_blocked_on(TaskId id, SemId s) const {
  const Task& t = task(id);
  return t.state == TaskState::blocked && t.blocked_on == s;
}

int Kernel::priority_of(TaskId id) const { return task(id).cfg.priority; }

const std::string& Kernel::task_name(TaskId id) const { return task(id).cfg.name; }

std::uint64_t Kernel::sem_releases(SemId s) const { return sem(s).releases; }
std::uint64_t Kernel::sem_passes(SemId s) const { return sem(s).passes; }
int Kernel::sem_count(SemId s) const { return sem(s).count; }

void Kernel::start() {
  TaskId best = pick_next();
  if (best != -1) begin_switch(best);
}

TaskId Kernel::pick_next() const {
  TaskId best = -1;
  for (const auto& [id, t] : tasks_) {
    if (t.state != TaskState::ready) continue;
    if (best == -1) {
      best = id;
      continue;
    }
    const Task& b = task(best);
    if (t.cfg.priority != b.cfg.priority) {
      if (t.cfg.priority > b.cfg.priority) best = id;
    } else if (t.ready_since < b.ready_since ||
               (t.ready_since == b.ready_since && t.ready_seq < b.ready_seq)) {
      best = id;
    }
  }
  return best;
}

void Kernel::make_ready(Task& t) {
  t.state = TaskState::ready;
  t.ready_since = eng_.now();
  t.ready_seq = ++ready_seq_counter_;
  t.blocked_on = 0;
}

void Kernel::begin_switch(TaskId to) {
  Task& from = task(current_);
  stash_work();
  if (from.state == TaskState::running) {
    // Preemption: the task keeps its original ready stamp, so it stays ahead
    // of equal-priority tasks that became ready while it ran.
    from.state = TaskState::ready;
  }
  emit(TraceKind::switch_begin, current_, to);
  kstate_ = KState::switching;
  switch_to_ = to;
  Duration cost = decide_cost_ + from.ctx.draw() + task(to).ctx.draw();
  switch_total_ = cost;
  begin_work(cost, EventKind::custom);
}

void Kernel::dispatch_current() {
  if (current_ != 0) emit(TraceKind::task_run_begin, current_);
  run_activity_or_advance();
}

void Kernel::run_activity_or_advance() {
  Task& t = task(current_);
  if (t.id == 0) return;  // idle: wait for events
  if (t.is_guest && !t.token_run && !guest_tokens_.empty() &&
      (t.activity.tag == Activity::Tag::none ||
       t.activity.tag == Activity::Tag::compute)) {
    start_token();
    return;
  }
  if (t.token_run) {
    begin_work(t.token_run->remaining, EventKind::task_step_done);
    return;
  }
  if (t.activity.tag != Activity::Tag::none) {
    EventKind kind = t.activity.tag == Activity::Tag::mask ? EventKind::mask_end
                                                           : EventKind::task_step_done;
    begin_work(t.activity.remaining, kind);
    return;
  }
  advance();
}

void Kernel::advance() {
  Task& t = task(current_);
  for (int guard = 0; guard < 1000000; ++guard) {
    if (t.is_guest && !guest_tokens_.empty()) {
      start_token();
      return;
    }
    std::optional<TaskStep> step = t.behavior ? t.behavior->next() : std::nullopt;
    if (!step) {
      finish_task(t);
      return;
    }
    if (apply_step(t, *step)) return;
  }
  throw Error(Errc::invalid_state, "task " + t.cfg.name + " made no timed progress");
}

bool Kernel::apply_step(Task& t, const TaskStep& step) {
  if (const auto* s = std::get_if<StepCompute>(&step)) {
    s->dur.validate();
    t.activity = Activity{Activity::Tag::compute, s->dur.sample(t.compute_rng), -1, -1};
    begin_work(t.activity.remaining, EventKind::task_step_done);
    return true;
  }
  if (const auto* s = std::get_if<StepMaskSection>(&step)) {
    if (t.is_guest)
      throw Error(Errc::invalid_state,
                  "guest tasks manage interrupts through soft masking only");
    Duration len = machine_.draw_section(s->sys);
    int token = machine_.enter_hard_mask(s->sys);
    t.activity = Activity{Activity::Tag::mask, len, token, -1};
    begin_work(len, EventKind::mask_end);
    return true;
  }
  if (const auto* s = std::get_if<StepSleep>(&step)) {
    s->dur.validate();
    Duration d = s->dur.sample(t.compute_rng);
    t.state = TaskState::sleeping;
    emit(TraceKind::task_run_end, t.id);
    TaskId id = t.id;
    t.sleep_ev =
        eng_.schedule_in(d, EventKind::task_step_done, [this, id] { on_sleep_done(id); });
    leave_cpu();
    return true;
  }
  if (const auto* s = std::get_if<StepWait>(&step)) {
    Semaphore& sm = sem(s->sem);
    if (sm.count > 0) {
      sm.count--;
      sm.passes++;
      return false;
    }
    t.state = TaskState::blocked;
    t.blocked_on = sm.id;
    t.block_time = eng_.now();
    t.block_seq = ++block_seq_counter_;
    sm.waiters.push_back(t.id);
    emit(TraceKind::task_run_end, t.id);
    leave_cpu();
    return true;
  }
  if (const auto* s = std::get_if<StepRelease>(&step)) {
    return do_release(s->sem, false);
  }
  if (const auto* s = std::get_if<StepSoftDisable>(&step)) {
    if (machine_.arch() != ArchVariant::virtualized)
      throw Error(Errc::arch_mismatch, "soft masking requires the virtualized architecture");
    if (!t.is_guest)
      throw Error(Errc::invalid_state, "soft mask toggled outside guest context");
    if (!machine_.has_line(s->line))
      throw Error(Errc::unknown_line, "irq line " + std::to_string(s->line));
    t.activity =
        Activity{Activity::Tag::toggle_disable, machine_.costs().soft_toggle, -1, s->line};
    begin_work(t.activity.remaining, EventKind::task_step_done);
    return true;
  }
  if (const auto* s = std::get_if<StepSoftEnable>(&step)) {
    if (machine_.arch() != ArchVariant::virtualized)
      throw Error(Errc::arch_mismatch, "soft masking requires the virtualized architecture");
    if (!t.is_guest)
      throw Error(Errc::invalid_state, "soft mask toggled outside guest context");
    if (!machine_.has_line(s->line))
      throw Error(Errc::unknown_line, "irq line " + std::to_string(s->line));
    t.activity =
        Activity{Activity::Tag::toggle_enable, machine_.costs().soft_toggle, -1, s->line};
    begin_work(t.activity.remaining, EventKind::task_step_done);
    return true;
  }
  const auto& s = std::get<StepIoTrigger>(step);
  if (!machine_.has_line(s.line))
    throw Error(Errc::unknown_line, "irq line " + std::to_string(s.line));
  s.delay.validate();
  Duration d = s.delay.sample(t.io_rng);
  int ln = s.line;
  eng_.schedule_in(d, EventKind::irq_assert, [this, ln] { machine_.raise_irq(ln); });
  return false;
}

void Kernel::start_token() {
  Task& g = task(current_);
  GuestToken tok = guest_tokens_.front();
  guest_tokens_.pop_front();
  Duration work{};
  auto it = guest_bodies_.find(tok.line);
  if (it != guest_bodies_.end())
    for (const auto& spec : it->second.specs) work += spec.sample(it->second.rng);
  if (tok.was_pending) work += machine_.costs().pending_mgmt;
  machine_.note_guest_handler_start(tok.line);
  emit(TraceKind::guest_handler_begin, tok.line);
  g.token_run = TokenRun{tok.line, work};
  begin_work(work, EventKind::task_step_done);
}

void Kernel::leave_cpu() {
  TaskId best = pick_next();
  begin_switch(best == -1 ? 0 : best);
}

void Kernel::finish_task(Task& t) {
  t.state = TaskState::finished;
  emit(TraceKind::task_run_end, t.id);
  leave_cpu();
}

void Kernel::sem_release(SemId s, bool from_isr) { do_release(s, from_isr); }

bool Kernel::do_release(SemId sid, bool from_isr) {
  Semaphore& s = sem(sid);
  s.releases++;
  emit(TraceKind::sem_release, sid, from_isr ? 1 : 0);
  if (s.waiters.empty()) {
    s.count++;
    return false;
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < s.waiters.size(); ++i) {
    const Task& a = task(s.waiters[i]);
    const Task& b = task(s.waiters[best]);
    if (a.cfg.priority != b.cfg.priority) {
      if (a.cfg.priority > b.cfg.priority) best = i;
    } else if (a.block_time < b.block_time ||
               (a.block_time == b.block_time && a.block_seq < b.block_seq)) {
      best = i;
    }
  }
  TaskId w = s.waiters[best];
  s.waiters.erase(s.waiters.begin() + static_cast<std::ptrdiff_t>(best));
  s.passes++;
  make_ready(task(w));
  emit(TraceKind::sem_wake, sid, w);
  if (from_isr) return false;  // dispatch decision happens at interrupt epilogue
  if (task(w).cfg.priority > task(current_).cfg.priority) {
    emit(TraceKind::task_run_end, current_);
    begin_switch(w);
    return true;
  }
  return false;
}

void Kernel::on_work_done() {
  if (kstate_ == KState::switching) {
    work_.reset();
    Task& to = task(switch_to_);
    switch_count_++;
    emit(TraceKind::switch_end, current_, switch_to_,
         static_cast<std::int64_t>(switch_total_.ns));
    current_ = switch_to_;
    to.state = TaskState::running;
    kstate_ = KState::running;
    // A wake that slipped in mid-switch may outrank the chosen task; the
    // completed switch then immediately yields to a second one.
    TaskId best = pick_next();
    if (best != -1 && task(best).cfg.priority > to.cfg.priority) {
      begin_switch(best);
      return;
    }
    dispatch_current();
    return;
  }

  Task& t = task(current_);
  work_.reset();

  if (t.token_run) {
    int ln = t.token_run->line;
    t.token_run.reset();
    guest_handler_runs_++;
    emit(TraceKind::guest_handler_end, ln);
    run_activity_or_advance();
    return;
  }

  switch (t.activity.tag) {
    case Activity::Tag::compute: {
      t.activity = Activity{};
      advance();
      return;
    }
    case Activity::Tag::mask: {
      int token = t.activity.mask_token;
      t.activity = Activity{};
      machine_.exit_hard_mask(token);
      machine_.poke();  // deferred raises dispatch before this task resumes
      if (stolen_) return;
      advance();
      return;
    }
    case Activity::Tag::toggle_disable: {
      int line = t.activity.line;
      t.activity = Activity{};
      machine_.soft_disable(line);
      advance();
      return;
    }
    case Activity::Tag::toggle_enable: {
      int line = t.activity.line;
      t.activity = Activity{};
      machine_.soft_enable(line);
      // Drained deliveries queued handler tokens for this guest: they run
      // before the script's next step.
      run_activity_or_advance();
      return;
    }
    case Activity::Tag::none:
      throw Error(Errc::invalid_state, "work completed with no owning activity");
  }
}

void Kernel::on_sleep_done(TaskId id) {
  Task& t = task(id);
  t.sleep_ev = EventHandle{};
  if (t.state != TaskState::sleeping) return;
  make_ready(t);
  if (stolen_ || kstate_ == KState::switching) return;
  if (t.cfg.priority > task(current_).cfg.priority) {
    if (current_ != 0) emit(TraceKind::task_run_end, current_);
    begin_switch(id);
  }
}

void Kernel::cpu_stolen() {
  stolen_ = true;
  pause_work();
  if (kstate_ == KState::running && current_ != 0 &&
      task(current_).state == TaskState::running)
    emit(TraceKind::task_run_end, current_);
}

void Kernel::cpu_released() {
  stolen_ = false;
  if (kstate_ == KState::switching) {
    resume_work();
    return;
  }
  TaskId best = pick_next();
  if (best != -1 && task(best).cfg.priority > task(current_).cfg.priority) {
    begin_switch(best);
    return;
  }
  if (current_ != 0) emit(TraceKind::task_run_begin, current_);
  if (work_) {
    resume_work();
    return;
  }
  run_activity_or_advance();
}

void Kernel::guest_deliver(int line, bool was_pending) {
  guest_tokens_.push_back(GuestToken{line, was_pending});
  if (guest_ == 0) return;
  Task& g = task(guest_);
  if (g.state == TaskState::sleeping) {
    eng_.cancel(g.sleep_ev);
    g.sleep_ev = EventHandle{};
    make_ready(g);
  }
}

bool Kernel::in_guest_context() const {
  return guest_ != 0 && current_ == guest_ && kstate_ == KState::running;
}

void Kernel::begin_work(Duration d, EventKind kind) {
  Work w;
  w.remaining = d;
  w.end = eng_.now() + d;
  w.ev = eng_.schedule_in(d, kind, [this] { on_work_done(); });
  w.live = true;
  work_ = w;
}

void Kernel::pause_work() {
  if (!work_ || !work_->live) return;
  eng_.cancel(work_->ev);
  work_->ev = EventHandle{};
  work_->remaining = work_->end - eng_.now();
  work_->live = false;
}

void Kernel::resume_work() {
  if (!work_ || work_->live) return;
  work_->end = eng_.now() + work_->remaining;
  work_->ev = eng_.schedule_in(work_->remaining, EventKind::task_step_done,
                               [this] { on_work_done(); });
  work_->live = true;
}

void Kernel::stash_work() {
  if (!work_) return;
  pause_work();
  Task& t = task(current_);
  if (t.token_run) {
    t.token_run->remaining = work_->remaining;
  } else if (t.activity.tag != Activity::Tag::none) {
    t.activity.remaining = work_->remaining;
  }
  work_.reset();
}

}  // namespace irqsim
