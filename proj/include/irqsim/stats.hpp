#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "irqsim/time.hpp"

namespace irqsim {

// max / avg +/- sigma aggregate over one latency series. Sigma is the
// population standard deviation (divide by n); at benchmark sample counts the
// distinction from the sample deviation is far below reporting precision.
struct Summary {
  std::uint64_t count = 0;
  Duration max{};
  Duration min{};
  double mean_us = 0.0;
  double sigma_us = 0.0;
};

// Single-pass (Welford) accumulator so multi-million-sample runs never need
// the series in memory twice.
class StreamingSummary {
 public:
  void add(Duration d);
  Summary finish() const;  // throws EmptyInput when nothing was added

  std::uint64_t count() const { return n_; }

 private:
  std::uint64_t n_ = 0;
  std::uint64_t max_ns_ = 0;
  std::uint64_t min_ns_ = UINT64_MAX;
  double mean_ns_ = 0.0;
  double m2_ = 0.0;
};

Summary summarize(std::span<const Duration> samples);

struct Histogram {
  Duration bucket_width{};
  std::map<std::uint64_t, std::uint64_t> buckets;  // index -> count
  std::uint64_t underflow = 0;
  std::uint64_t overflow = 0;
  std::uint64_t total = 0;
};

// index = floor(sample / bucket_width); boundary samples land in the upper
// bucket. Throws BadWidth on width 0.
Histogram histogram(std::span<const Duration> samples, Duration bucket_width);

class StreamingHistogram {
 public:
  explicit StreamingHistogram(Duration bucket_width);
  void add(Duration d);
  Histogram finish() const { return h_; }

 private:
  Histogram h_;
};

// Per-scenario, per-architecture aggregate in the shape of the published
// results table.
struct RunReport {
  std::string scenario;
  std::string arch;       // "direct" | "virtualized"
  bool loaded = false;
  std::uint64_t seed = 0;
  Summary irq_latency;
  Summary cs_delay;
  Histogram irq_hist;
  Histogram cs_hist;
  std::uint64_t sample_count = 0;   // clean cycles; + overrun_count == interrupt_count
  std::uint64_t overrun_count = 0;
  std::uint64_t warmup_discarded = 0;
  std::string config_echo;          // normalized scenario document
};

// Fixed-layout comparison table grouped Idle/Loaded, one row per report,
// times in microseconds with one decimal.
std::string render_table(const std::vector<RunReport>& reports);

}  // namespace irqsim
