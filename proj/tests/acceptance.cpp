// Acceptance gate: exercises the full benchmark pipeline and prints one
// [PASS]/[FAIL] line per criterion. Exits nonzero if any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "irqsim/presets.hpp"
#include "irqsim/report.hpp"
#include "irqsim/runner.hpp"
#include "irqsim/scenario.hpp"
#include "irqsim/stats.hpp"
#include "support/interleave_worlds.hpp"
#include "support/oracle_worlds.hpp"

using namespace irqsim;

namespace {

int failures = 0;

void report_line(int idx, const std::string& what, bool ok, const std::string& detail) {
  std::printf("[%s] %d: %s%s%s\n", ok ? "PASS" : "FAIL", idx, what.c_str(),
              detail.empty() ? "" : " — ", detail.c_str());
  std::fflush(stdout);
  if (!ok) failures++;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(const char* f, ...) {
  char buf[512];
  va_list ap;
  va_start(ap, f);
  std::vsnprintf(buf, sizeof buf, f, ap);
  va_end(ap);
  return buf;
}

struct PresetRun {
  Scenario sc;
  RawRun raw;
  RunReport report;
  double wall = 0.0;
};

PresetRun run_preset(const std::string& name) {
  PresetRun p;
  p.sc = preset(name);
  auto t0 = std::chrono::steady_clock::now();
  p.raw = run_measure(p.sc, nullptr);
  p.wall = seconds_since(t0);
  p.report = build_report(p.sc, p.raw);
  return p;
}

bool within(double value, double anchor, double tol) {
  return std::fabs(value - anchor) <= tol * anchor;
}

// ---------------------------------------------------------------------------

void criterion_1(const std::vector<PresetRun>& runs) {
  const PresetRun& di = runs[0];
  const PresetRun& vi = runs[2];
  bool cal = within(di.report.irq_latency.mean_us, 1.3, 0.20) &&
             within(di.report.cs_delay.mean_us, 2.2, 0.20) &&
             within(vi.report.irq_latency.mean_us, 1.7, 0.20) &&
             within(vi.report.cs_delay.mean_us, 8.7, 0.20);
  double slowest = 0.0;
  bool full = true;
  for (const PresetRun& p : runs) {
    slowest = std::max(slowest, p.wall);
    if (p.sc.measure.interrupt_count != 100000) full = false;
    if (p.wall >= 10.0) full = false;
  }
  report_line(1, "idle means within 20% of the published anchors at 1e5 interrupts",
              cal && full,
              fmt("direct %.2f/%.2fus vs 1.3/2.2, virtualized %.2f/%.2fus vs 1.7/8.7; "
                  "slowest run %.2fs",
                  di.report.irq_latency.mean_us, di.report.cs_delay.mean_us,
                  vi.report.irq_latency.mean_us, vi.report.cs_delay.mean_us, slowest));
}

void criterion_2(const std::vector<PresetRun>& runs) {
  const PresetRun& dl = runs[1];
  const PresetRun& vl = runs[3];
  bool same_seed = dl.sc.measure.seed == vl.sc.measure.seed;
  double ratio = static_cast<double>(vl.report.irq_latency.max.ns) /
                 static_cast<double>(dl.report.irq_latency.max.ns);
  report_line(2, "loaded virtualized max latency at least 5x the loaded direct max",
              same_seed && ratio >= 5.0,
              fmt("max %.1fus vs %.1fus, ratio %.1fx, seed %llu",
                  static_cast<double>(vl.report.irq_latency.max.ns) / 1000.0,
                  static_cast<double>(dl.report.irq_latency.max.ns) / 1000.0, ratio,
                  static_cast<unsigned long long>(dl.sc.measure.seed)));
}

void criterion_3(const std::vector<PresetRun>& runs) {
  const PresetRun& dl = runs[1];
  bool has_bound = dl.raw.hard_bound.has_value();
  std::uint64_t bound = has_bound ? dl.raw.hard_bound->ns : 0;
  std::uint64_t expect = dl.sc.arch.mask_section_cap->ns +
                         dl.sc.arch.isr_entry.max_support()->ns;
  bool ok = has_bound && bound == expect && dl.report.irq_latency.max.ns <= bound;
  report_line(3, "loaded direct max stays under the masked-section cap plus entry cost",
              ok,
              fmt("max %.1fus <= bound %.2fus",
                  static_cast<double>(dl.report.irq_latency.max.ns) / 1000.0,
                  static_cast<double>(bound) / 1000.0));
}

void criterion_4(const std::vector<PresetRun>& runs) {
  bool ok = true;
  for (std::size_t i : {std::size_t{1}, std::size_t{3}}) {
    const PresetRun& a = runs[i];
    RawRun again = run_measure(a.sc, nullptr);
    RunReport rep = build_report(a.sc, again);
    if (report_json(rep) != report_json(a.report)) ok = false;
    if (samples_csv(again.samples) != samples_csv(a.raw.samples)) ok = false;
  }
  report_line(4, "same seed reproduces report.json and samples.csv byte for byte", ok,
              "checked on both loaded presets");
}

void criterion_5() {
  int matched = 0;
  std::size_t total_records = 0;
  bool ok = true;
  for (std::uint64_t case_id = 0; case_id < 500 && ok; ++case_id) {
    std::mt19937_64 rng(0x5EED0000 + case_id);
    oracle::GenSystem g = oracle::generate(rng);
    std::vector<refsim::Out> want =
        refsim::RefSim(g.decide, g.idle_ctx, g.tasks, g.sem_initial).run();
    oracle::ProductionRun got = oracle::run_production(g);
    if (!got.idle || oracle::first_divergence(got.out, want) != static_cast<std::size_t>(-1)) {
      ok = false;
      break;
    }
    matched++;
    total_records += want.size();
  }
  ok = ok && matched == 500 && total_records > 10000;
  report_line(5, "scheduler matches the independent reference on 500 random systems", ok,
              fmt("%d/500 exact trace matches, %zu records", matched, total_records));
}

void criterion_6() {
  // Latency invariance on edge-only worlds: the rt line's (time, latency)
  // stream must not move whatever the guest does with its soft masks.
  int invariant = 0;
  for (std::uint64_t case_id = 0; case_id < 200; ++case_id) {
    interleave::InterleaveRun a =
        interleave::run_interleaving(interleave::random_spec(case_id, true, false));
    interleave::InterleaveRun b =
        interleave::run_interleaving(interleave::random_spec(case_id, false, false));
    if (a.rt_enters == b.rt_enters && a.rt_enters.size() == a.rt_raise_count) invariant++;
  }

  // Conservation, level saturation and drain order on mixed-trigger worlds.
  int conserved = 0, mixed_cases = 0;
  int level_pends = 0;
  bool saturated = true;
  bool ordered = true;
  int drains = 0;
  for (std::uint64_t case_id = 0; case_id < 200; ++case_id) {
    interleave::InterleaveSpec spec = interleave::random_spec(case_id, true, true);
    interleave::InterleaveRun r = interleave::run_interleaving(spec);
    mixed_cases++;

    std::uint64_t coalesced = 0, fresh = 0, pends = 0, drained = 0, delivered = 0;
    for (const auto& rec : r.rec.records) {
      if (rec.kind == TraceKind::irq_coalesced && rec.a != interleave::kRtLine) coalesced++;
      if (rec.kind == TraceKind::guest_deliver) {
        delivered++;
        if (rec.b == 1)
          drained++;
        else
          fresh++;
      }
      if (rec.kind == TraceKind::guest_pend) {
        pends++;
        if (spec.level_line && rec.a == 1) {
          level_pends++;
          if (rec.b != 1) saturated = false;
        }
      }
    }
    std::uint64_t raises = 0, pending_left = 0;
    for (std::size_t l = 0; l < r.raises_end.size(); ++l) {
      raises += r.raises_end[l];
      pending_left += r.soft_pending_end[l];
    }
    if (raises == coalesced + fresh + pends && drained + pending_left <= pends &&
        delivered == r.handler_runs + r.queue_depth_end)
      conserved++;

    // Drained deliveries sit back-to-back after their enable, same line and
    // instant; tokens start in delivery order.
    const auto& recs = r.rec.records;
    for (std::size_t i = 0; i < recs.size(); ++i) {
      if (recs[i].kind != TraceKind::soft_enable) continue;
      std::size_t j = i + 1;
      while (j < recs.size() && recs[j].kind == TraceKind::guest_deliver &&
             recs[j].b == 1) {
        if (recs[j].a != recs[i].a || recs[j].t.ns != recs[i].t.ns) ordered = false;
        ++j;
        ++drains;
      }
      for (std::size_t k = j; k < recs.size(); ++k) {
        if (recs[k].kind == TraceKind::soft_enable) break;
        if (recs[k].kind == TraceKind::guest_deliver && recs[k].b == 1) ordered = false;
      }
    }
    std::vector<int> del, begun;
    for (const auto& rec : recs) {
      if (rec.kind == TraceKind::guest_deliver) del.push_back(static_cast<int>(rec.a));
      if (rec.kind == TraceKind::guest_handler_begin)
        begun.push_back(static_cast<int>(rec.a));
    }
    if (begun.size() > del.size()) ordered = false;
    for (std::size_t i = 0; i < begun.size() && i < del.size(); ++i)
      if (begun[i] != del[i]) ordered = false;
  }

  bool ok = invariant == 200 && conserved == mixed_cases && saturated &&
            level_pends > 50 && ordered && drains > 100;
  report_line(6, "soft-mask interleaving invariants hold on 200 randomized worlds", ok,
              fmt("invariance %d/200, conservation %d/%d, %d level pends saturated, "
                  "%d drains in order",
                  invariant, conserved, mixed_cases, level_pends, drains));
}

void criterion_7() {
  bool ok = true;
  auto rel_err = [](double a, double b) {
    return std::fabs(a - b) / std::max({std::fabs(a), std::fabs(b), 1.0});
  };
  std::uint64_t largest = 0;
  for (int set = 0; set < 100 && ok; ++set) {
    std::mt19937_64 rng(0xABCD0000 + static_cast<std::uint64_t>(set));
    std::size_t n;
    switch (set % 4) {
      case 0: n = 1 + rng() % 10; break;
      case 1: n = 1 + rng() % 1000; break;
      case 2: n = 1 + rng() % 100000; break;
      default: n = 1000000; break;
    }
    largest = std::max<std::uint64_t>(largest, n);
    std::uint64_t base = (set % 3 == 0) ? 10000000000ull : 0;
    std::vector<Duration> xs;
    xs.reserve(n);
    StreamingSummary stream;
    for (std::size_t i = 0; i < n; ++i) {
      Duration d{base + rng() % 500000};
      xs.push_back(d);
      stream.add(d);
    }
    // Numerically stable two-pass reference: exact mean first, then moments.
    long double sum = 0;
    std::uint64_t mx = 0, mn = UINT64_MAX;
    for (Duration d : xs) {
      sum += static_cast<long double>(d.ns);
      mx = std::max(mx, d.ns);
      mn = std::min(mn, d.ns);
    }
    long double mean = sum / static_cast<long double>(n);
    long double m2 = 0;
    for (Duration d : xs) {
      long double dd = static_cast<long double>(d.ns) - mean;
      m2 += dd * dd;
    }
    double mean_us = static_cast<double>(mean / 1000.0L);
    double sigma_us = static_cast<double>(
        std::sqrt(static_cast<double>(m2 / static_cast<long double>(n))) / 1000.0);
    Summary s = stream.finish();
    if (s.count != n || s.max.ns != mx || s.min.ns != mn) ok = false;
    if (rel_err(s.mean_us, mean_us) >= 1e-9) ok = false;
    if (rel_err(s.sigma_us, sigma_us) >= 1e-9) ok = false;

    if (set % 5 == 0) {
      Histogram h = histogram(xs, Duration{1000 + rng() % 5000});
      std::uint64_t in_buckets = 0;
      for (const auto& [idx, cnt] : h.buckets) in_buckets += cnt;
      if (h.underflow + in_buckets + h.overflow != n || h.total != n) ok = false;
    }
  }
  report_line(7, "streaming statistics agree with a two-pass reference to 1e-9", ok,
              fmt("100 sets, largest %llu samples; histograms conserve counts",
                  static_cast<unsigned long long>(largest)));
}

void criterion_8(const std::vector<PresetRun>& runs) {
  bool ok = true;
  std::uint64_t overruns_total = 0;
  for (const PresetRun& p : runs) {
    std::uint64_t count = p.sc.measure.interrupt_count;
    if (p.raw.samples.size() != count) ok = false;
    std::uint64_t flagged = 0;
    for (const auto& s : p.raw.samples)
      if (s.overrun) flagged++;
    if (flagged != p.raw.overrun_count) ok = false;
    if (p.report.sample_count + p.report.overrun_count != count) ok = false;
    overruns_total += p.raw.overrun_count;
  }
  report_line(8, "every interrupt is accounted for as a sample or an overrun", ok,
              fmt("4 presets x 1e5 cycles, %llu overruns total",
                  static_cast<unsigned long long>(overruns_total)));
}

void criterion_9() {
  namespace fs = std::filesystem;
  fs::path base = fs::temp_directory_path() / "irqsim-acceptance";
  fs::remove_all(base);
  auto t0 = std::chrono::steady_clock::now();
  std::vector<std::string> dirs;
  bool ok = true;
  for (const std::string& name : preset_names()) {
    RunOptions opt;
    opt.write_samples = true;
    RunResult res = run_to_dir(preset(name), base / name, opt);
    dirs.push_back(res.dir.string());
    for (const char* f : {"report.json", "table.txt", "samples.csv", "hist_irq.csv",
                          "hist_cs.csv"})
      if (!fs::exists(res.dir / f)) ok = false;
  }
  std::vector<RunReport> reports;
  for (const std::string& d : dirs) reports.push_back(load_report_file(d));
  write_file_atomic(base / "table.txt", render_table(reports));
  double wall = seconds_since(t0);
  ok = ok && fs::exists(base / "table.txt") && reports.size() == 4 && wall < 60.0;
  report_line(9, "full four-preset pipeline lands its artifacts in under a minute", ok,
              fmt("%.1fs for 4 runs + merged table", wall));
}

}  // namespace

int main() {
  std::vector<PresetRun> runs;
  try {
    for (const std::string& name : preset_names()) runs.push_back(run_preset(name));
  } catch (const std::exception& e) {
    std::printf("[FAIL] 0: preset runs completed — %s\n", e.what());
    return 1;
  }

  auto guarded = [&](int idx, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      report_line(idx, "criterion body ran to completion", false, e.what());
    }
  };
  guarded(1, [&] { criterion_1(runs); });
  guarded(2, [&] { criterion_2(runs); });
  guarded(3, [&] { criterion_3(runs); });
  guarded(4, [&] { criterion_4(runs); });
  guarded(5, [] { criterion_5(); });
  guarded(6, [] { criterion_6(); });
  guarded(7, [] { criterion_7(); });
  guarded(8, [&] { criterion_8(runs); });
  guarded(9, [] { criterion_9(); });

  if (failures == 0) {
    std::printf("all 9 criteria pass\n");
    return 0;
  }
  std::printf("%d criteria FAILED\n", failures);
  return 1;
}
