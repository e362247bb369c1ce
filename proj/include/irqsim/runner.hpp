#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "irqsim/report.hpp"

namespace irqsim {

struct RunOptions {
  std::optional<std::uint64_t> seed;  // overrides the scenario's seed
  bool write_samples = false;
  bool write_trace = false;
};

struct RunResult {
  std::filesystem::path dir;
  RunReport report;
};

// Runs the scenario and writes report.json, table.txt, hist_irq.{csv,dat},
// hist_cs.{csv,dat} — plus samples.csv / trace.csv on request — into out_dir.
RunResult run_to_dir(Scenario sc, const std::filesystem::path& out_dir,
                     const RunOptions& opt);

// Accepts a run directory or a report.json path.
RunReport load_report_file(const std::filesystem::path& p);

}  // namespace irqsim
