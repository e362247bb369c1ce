#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "irqsim/kernel.hpp"
#include "irqsim/machine.hpp"
#include "irqsim/trace.hpp"

namespace irqsim {

struct MeasureConfig {
  std::uint64_t interrupt_count = 100000;
  std::uint32_t rate_hz = 4000;
  std::uint32_t warmup_discard = 16;
  std::uint64_t seed = 1;
  int timer_hw_priority = 10;
};

// Architecture cost block: what the platform charges for dispatch, context
// switching, and its own masked critical sections.
struct ArchCfg {
  ArchVariant variant = ArchVariant::direct;
  DistributionSpec isr_entry = DistributionSpec::constant(Duration{});
  DistributionSpec timer_isr_body = DistributionSpec::constant(Duration::nanos(800));
  Duration decide_cost{};
  std::map<std::string, DistributionSpec> context;  // task name -> switch half-cost
  std::map<Subsystem, DistributionSpec> hard_mask_sections;
  std::optional<Duration> mask_section_cap;
  Duration soft_toggle{};   // virtualized only
  Duration pending_mgmt{};  // virtualized only
};

// Interrupt flood: a device line raised at random inter-arrival times whose
// service path runs handler work, deferred kernel work, and a masked driver
// section.
struct NetStormSpec {
  bool enabled = false;
  DistributionSpec inter_arrival = DistributionSpec::shifted_exp(Duration::micros(8), Duration::micros(24));
  DistributionSpec isr_body = DistributionSpec::constant(Duration::micros(1));
  DistributionSpec kernel_work = DistributionSpec::constant(Duration::micros(2));
  DistributionSpec mask_section = DistributionSpec::constant(Duration::micros(1));
  int hw_priority = 5;
  int worker_priority = 50;
};

// Byte-pump: a task that computes a chunk, pokes a device, and waits for its
// completion interrupt, which runs a handler with a masked driver section.
struct SerialCopierSpec {
  bool enabled = false;
  int priority = 10;
  DistributionSpec chunk_work = DistributionSpec::constant(Duration::micros(12));
  DistributionSpec serial_irq = DistributionSpec::constant(Duration::micros(1));
  DistributionSpec mask_section = DistributionSpec::constant(Duration::micros(1));
  DistributionSpec device_delay = DistributionSpec::constant(Duration::micros(4));
  int hw_priority = 3;
};

struct LoadSpec {
  NetStormSpec net_storm;
  SerialCopierSpec serial_copier;
  bool any() const { return net_storm.enabled || serial_copier.enabled; }
};

struct ReportCfg {
  Duration bucket_width = Duration::micros(1);
};

// Complete description of one simulated system; the scenario file format is a
// one-to-one rendering of this.
struct Scenario {
  std::string name = "custom";
  ArchCfg arch;
  LoadSpec load;
  MeasureConfig measure;
  ReportCfg report;
};

struct LatencySample {
  std::uint64_t n = 0;  // 1-based measurement cycle index
  Duration irq_latency{};
  Duration cs_delay{};
  bool overrun = false;
};

struct RawRun {
  std::vector<LatencySample> samples;  // one per measurement cycle
  std::uint64_t overrun_count = 0;
  std::uint64_t seed = 0;
  std::optional<Duration> hard_bound;  // direct dispatch: cap + max vectoring cost
  Timestamp end_time{};
};

// The measurement instrument: a periodic timer interrupt at exact period
// multiples; its handler timestamps the release of a semaphore that the
// highest-priority measurement task blocks on. Each cycle yields the pair
// (interrupt latency, context-switch delay). A cycle whose release finds the
// measurement task not yet re-blocked is an overrun.
class TestRig {
 public:
  static constexpr int kTimerLine = 0;
  static constexpr int kMtPriority = 1000;

  TestRig(Engine& eng, Machine& machine, Kernel& kernel, TraceSink& trace,
          const MeasureConfig& cfg, DistributionSpec timer_body,
          DistributionSpec mt_ctx);

  // Schedules the first timer fire one period from now.
  void arm();

  bool done() const { return samples_.size() >= cfg_.interrupt_count; }
  const std::vector<LatencySample>& samples() const { return samples_; }
  std::uint64_t overruns() const { return overruns_; }
  Duration period() const { return period_; }
  TaskId measurement_task() const { return mt_; }

 private:
  class MtBehavior;

  void fire(std::uint64_t k);
  void on_timer_entry(Duration latency);
  void on_timer_action();
  void on_mt_cycle();

  struct PendingCycle {
    std::uint64_t n = 0;
    Duration irq_latency{};
    Timestamp released{};
    bool overrun = false;
  };

  Engine& eng_;
  Machine& machine_;
  Kernel& kernel_;
  TraceSink& trace_;
  MeasureConfig cfg_;
  Duration period_{};
  Timestamp base_{};
  TaskId mt_ = 0;
  SemId sem_ = 0;
  std::uint64_t entries_ = 0;
  Duration pending_latency_{};
  std::deque<PendingCycle> fifo_;
  std::vector<LatencySample> samples_;
  std::uint64_t overruns_ = 0;
};

// Semantic checks that span sections: load priorities must stay below the
// measurement instrument's, each variant admits only its own cost knobs, and
// masked sections require a cap. Throws ConfigError.
void validate_scenario(const Scenario& sc);

// Builds the whole system for a scenario, runs it to completion, and audits
// the result (cycle conservation, latency floor, and the direct-dispatch hard
// bound when it applies).
RawRun run_measure(const Scenario& sc, TraceSink* sink = nullptr);

}  // namespace irqsim
