#include "irqsim/runner.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace irqsim {

namespace {

// Streams trace records straight to disk; a full run's trace is far too
// large to buffer.
class CsvTraceSink final : public TraceSink {
 public:
  explicit CsvTraceSink(const std::filesystem::path& p) : out_(p, std::ios::binary) {
    if (!out_) throw Error(Errc::config_error, "cannot write " + p.string());
    out_ << "t_ns,kind,a,b,c\n";
  }

  void on(const TraceRecord& r) override {
    char buf[128];
    std::snprintf(buf, sizeof(buf), "%llu,%s,%lld,%lld,%lld\n",
                  static_cast<unsigned long long>(r.t.ns), trace_kind_name(r.kind),
                  static_cast<long long>(r.a), static_cast<long long>(r.b),
                  static_cast<long long>(r.c));
    out_ << buf;
  }

 private:
  std::ofstream out_;
};

}  // namespace

RunResult run_to_dir(Scenario sc, const std::filesystem::path& out_dir,
                     const RunOptions& opt) {
  if (opt.seed) sc.measure.seed = *opt.seed;
  std::filesystem::create_directories(out_dir);

  std::unique_ptr<CsvTraceSink> trace;
  if (opt.write_trace) trace = std::make_unique<CsvTraceSink>(out_dir / "trace.csv");

  RawRun run = run_measure(sc, trace.get());
  RunReport report = build_report(sc, run);

  write_file_atomic(out_dir / "report.json", report_json(report));
  write_file_atomic(out_dir / "table.txt", render_table({report}));
  write_file_atomic(out_dir / "hist_irq.csv", histogram_csv(report.irq_hist));
  write_file_atomic(out_dir / "hist_cs.csv", histogram_csv(report.cs_hist));
  write_file_atomic(out_dir / "hist_irq.dat", histogram_dat(report.irq_hist));
  write_file_atomic(out_dir / "hist_cs.dat", histogram_dat(report.cs_hist));
  if (opt.write_samples)
    write_file_atomic(out_dir / "samples.csv", samples_csv(run.samples));

  return RunResult{out_dir, std::move(report)};
}

RunReport load_report_file(const std::filesystem::path& p) {
  std::filesystem::path file = p;
  if (std::filesystem::is_directory(file)) file /= "report.json";
  std::ifstream f(file, std::ios::binary);
  if (!f) throw Error(Errc::config_error, "cannot read report " + file.string());
  std::ostringstream buf;
  buf << f.rdbuf();
  return report_from_json(buf.str());
}

}  // namespace irqsim
