#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "irqsim/harness.hpp"
#include "irqsim/stats.hpp"

namespace irqsim {

// Aggregates a raw run: statistics and histograms cover the clean
// (non-overrun) cycles past the warmup window; counts cover everything.
RunReport build_report(const Scenario& sc, const RawRun& run);

// Deterministic JSON rendering: same report -> identical bytes.
std::string report_json(const RunReport& r);
RunReport report_from_json(const std::string& text);

// Header: n,irq_latency_ns,cs_delay_ns,overrun — one row per cycle.
std::string samples_csv(const std::vector<LatencySample>& samples);

// bucket,lower_ns,upper_ns,count rows in bucket order.
std::string histogram_csv(const Histogram& h);

// gnuplot-ready two-column form: lower edge in us, count.
std::string histogram_dat(const Histogram& h);

// Writes via a temp file + rename so readers never see partial output.
void write_file_atomic(const std::filesystem::path& p, const std::string& content);

}  // namespace irqsim
