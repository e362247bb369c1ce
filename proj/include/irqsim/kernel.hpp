#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "irqsim/dist.hpp"
#include "irqsim/engine.hpp"
#include "irqsim/machine.hpp"
#include "irqsim/trace.hpp"

namespace irqsim {

using TaskId = int;  // 0 is the built-in idle task
using SemId = int;   // valid ids start at 1

struct StepCompute {
  DistributionSpec dur;
};
struct StepMaskSection {
  Subsystem sys = Subsystem::kernel_sync;
};
struct StepSleep {
  DistributionSpec dur;
};
struct StepWait {
  SemId sem = 0;
};
struct StepRelease {
  SemId sem = 0;
};
struct StepSoftDisable {
  int line = 0;
};
struct StepSoftEnable {
  int line = 0;
};
struct StepIoTrigger {
  int line = 0;
  DistributionSpec delay;
};

using TaskStep = std::variant<StepCompute, StepMaskSection, StepSleep, StepWait,
                              StepRelease, StepSoftDisable, StepSoftEnable,
                              StepIoTrigger>;

// A task's program: the kernel pulls the next step each time the previous one
// completes. Returning nullopt finishes the task.
class Behavior {
 public:
  virtual ~Behavior() = default;
  virtual std::optional<TaskStep> next() = 0;
};

class ScriptBehavior final : public Behavior {
 public:
  ScriptBehavior(std::vector<TaskStep> steps, bool loop)
      : steps_(std::move(steps)), loop_(loop) {}

  std::optional<TaskStep> next() override {
    if (pos_ == steps_.size()) {
      if (!loop_ || steps_.empty()) return std::nullopt;
      pos_ = 0;
    }
    return steps_[pos_++];
  }

 private:
  std::vector<TaskStep> steps_;
  bool loop_;
  std::size_t pos_ = 0;
};

struct TaskConfig {
  std::string name;
  int priority = 0;                // higher value runs first
  DistributionSpec context_cost =  // one draw to save, one to restore
      DistributionSpec::constant(Duration{});
};

enum class TaskState : std::uint8_t { ready, running, blocked, sleeping, finished };

// Fixed-priority preemptive scheduler with counting semaphores, sitting under
// the machine: whenever the machine holds the CPU (ISRs, dispatcher sweeps)
// the kernel freezes, and every release of the CPU re-runs the scheduling
// decision so the highest-priority wake from interrupt context wins the CPU
// through an explicit, costed context switch.
class Kernel final : public KernelClient {
 public:
  Kernel(Engine& eng, Machine& machine, TraceSink& trace, Duration decide_cost);

  TaskId create_task(TaskConfig cfg, std::unique_ptr<Behavior> behavior);
  // Virtualized only: the guest OS modeled as one lowest-priority task that
  // also executes delivered guest interrupt handlers.
  TaskId create_guest_task(TaskConfig cfg, std::unique_ptr<Behavior> behavior);
  SemId create_semaphore(std::string name, int initial = 0);

  // Replaces the idle task's context-restore cost (defaults to zero).
  void set_idle_context(const DistributionSpec& spec);

  // Handler work charged per delivery on the given guest-routed line: one
  // draw per listed distribution, summed.
  void set_guest_body(int line, std::vector<DistributionSpec> specs);

  // Dispatches the best ready task (if any) through an initial switch.
  void start();

  void sem_release(SemId sem, bool from_isr);

  TaskId current() const { return current_; }
  TaskId idle_task() const { return 0; }
  TaskId guest_task() const { return guest_; }
  TaskState task_state(TaskId id) const;
  bool task_blocked_on(TaskId id, SemId sem) const;
  int priority_of(TaskId id) const;
  const std::string& task_name(TaskId id) const;

  std::uint64_t sem_releases(SemId sem) const;
  std::uint64_t sem_passes(SemId sem) const;  // immediate passes + wakes
  int sem_count(SemId sem) const;
  std::uint64_t switch_count() const { return switch_count_; }
  std::uint64_t guest_handler_runs() const { return guest_handler_runs_; }
  std::size_t guest_queue_depth() const { return guest_tokens_.size(); }

  // KernelClient
  void cpu_stolen() override;
  void cpu_released() override;
  void guest_deliver(int line, bool was_pending) override;
  bool in_guest_context() const override;

 private:
  struct Activity {
    enum class Tag : std::uint8_t { none, compute, mask, toggle_disable, toggle_enable };
    Tag tag = Tag::none;
    Duration remaining{};
    int mask_token = -1;
    int line = -1;
  };

  struct TokenRun {
    int line = -1;
    Duration remaining{};
  };

  struct GuestToken {
    int line = -1;
    bool was_pending = false;
  };

  struct Task {
    TaskId id = 0;
    TaskConfig cfg;
    std::unique_ptr<Behavior> behavior;
    TaskState state = TaskState::ready;
    Timestamp ready_since{};
    std::uint64_t ready_seq = 0;
    SemId blocked_on = 0;
    Timestamp block_time{};
    std::uint64_t block_seq = 0;
    Activity activity;
    std::optional<TokenRun> token_run;
    bool is_guest = false;
    EventHandle sleep_ev{};
    Sampler ctx;
    Rng compute_rng;
    Rng io_rng;
  };

  struct Semaphore {
    SemId id = 0;
    std::string name;
    int count = 0;
    std::vector<TaskId> waiters;
    std::uint64_t releases = 0;
    std::uint64_t passes = 0;
  };

  struct GuestBody {
    std::vector<DistributionSpec> specs;
    Rng rng;
  };

  enum class KState : std::uint8_t { running, switching };

  struct Work {
    Duration remaining{};
    Timestamp end{};
    EventHandle ev{};
    bool live = false;
  };

  Task& task(TaskId id);
  const Task& task(TaskId id) const;
  Semaphore& sem(SemId id);
  const Semaphore& sem(SemId id) const;

  TaskId pick_next() const;  // best ready task, -1 if none
  void begin_switch(TaskId to);
  void dispatch_current();
  void run_activity_or_advance();
  void advance();
  bool apply_step(Task& t, const TaskStep& step);  // true: the task turned the CPU over
  void start_token();
  void leave_cpu();
  void finish_task(Task& t);
  bool do_release(SemId sid, bool from_isr);
  void on_work_done();
  void on_sleep_done(TaskId id);
  void make_ready(Task& t);

  void begin_work(Duration d, EventKind kind);
  void pause_work();
  void resume_work();
  void stash_work();  // move a paused remainder back into the owning activity

  void emit(TraceKind k, std::int64_t a = -1, std::int64_t b = -1, std::int64_t c = -1) {
    trace_.on(TraceRecord{eng_.now(), k, a, b, c});
  }

  Engine& eng_;
  Machine& machine_;
  TraceSink& trace_;
  Duration decide_cost_{};

  std::map<TaskId, Task> tasks_;
  std::map<SemId, Semaphore> sems_;
  TaskId next_task_id_ = 1;
  SemId next_sem_id_ = 1;

  KState kstate_ = KState::running;
  TaskId current_ = 0;
  bool stolen_ = false;
  std::optional<Work> work_;
  TaskId switch_to_ = 0;
  Duration switch_total_{};

  std::uint64_t ready_seq_counter_ = 0;
  std::uint64_t block_seq_counter_ = 0;
  std::uint64_t switch_count_ = 0;
  std::uint64_t guest_handler_runs_ = 0;

  TaskId guest_ = 0;
  std::deque<GuestToken> guest_tokens_;
  std::map<int, GuestBody> guest_bodies_;
};

}  // namespace irqsim
