#include "irqsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "irqsim/error.hpp"

namespace irqsim {

void StreamingSummary::add(Duration d) {
  ++n_;
  max_ns_ = std::max(max_ns_, d.ns);
  min_ns_ = std::min(min_ns_, d.ns);
  double x = static_cast<double>(d.ns);
  double delta = x - mean_ns_;
  mean_ns_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_ns_);
}

Summary StreamingSummary::finish() const {
  if (n_ == 0) throw Error(Errc::empty_input, "summarize over empty sample set");
  Summary s;
  s.count = n_;
  s.max = Duration{max_ns_};
  s.min = Duration{min_ns_};
  s.mean_us = mean_ns_ / 1000.0;
  s.sigma_us = std::sqrt(m2_ / static_cast<double>(n_)) / 1000.0;
  return s;
}

Summary summarize(std::span<const Duration> samples) {
  StreamingSummary acc;
  for (Duration d : samples) acc.add(d);
  return acc.finish();
}

StreamingHistogram::StreamingHistogram(Duration bucket_width) {
  if (bucket_width.ns == 0) throw Error(Errc::bad_width, "bucket width must be > 0");
  h_.bucket_width = bucket_width;
}

void StreamingHistogram::add(Duration d) {
  ++h_.total;
  ++h_.buckets[d.ns / h_.bucket_width.ns];
}

Histogram histogram(std::span<const Duration> samples, Duration bucket_width) {
  StreamingHistogram acc(bucket_width);
  for (Duration d : samples) acc.add(d);
  return acc.finish();
}

namespace {

std::string cell(const Summary& s) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%7.1f   (%5.1f±%.1f)", s.max.as_us(),
                s.mean_us, s.sigma_us);
  return buf;
}

void render_group(std::string& out, const char* title,
                  std::vector<const RunReport*> rows) {
  if (rows.empty()) return;
  std::stable_sort(rows.begin(), rows.end(), [](const RunReport* a, const RunReport* b) {
    if (a->arch != b->arch) return a->arch < b->arch;
    return a->scenario < b->scenario;
  });
  out += title;
  out += '\n';
  for (const RunReport* r : rows) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), "%-22s %s   %s\n", r->scenario.c_str(),
                  cell(r->irq_latency).c_str(), cell(r->cs_delay).c_str());
    out += buf;
  }
}

}  // namespace

std::string render_table(const std::vector<RunReport>& reports) {
  if (reports.empty())
    throw Error(Errc::empty_input, "render_table needs at least one report");
  std::string out;
  out += "                       Interrupt Latency       Context Switching\n";
  out += "                           max    avg±σ            max    avg±σ\n";
  out += "  (all times in µs)\n";
  std::vector<const RunReport*> idle, loaded;
  for (const auto& r : reports) (r.loaded ? loaded : idle).push_back(&r);
  render_group(out, "  --- Idle System ---", std::move(idle));
  render_group(out, "  --- Loaded System ---", std::move(loaded));
  return out;
}

}  // namespace irqsim
