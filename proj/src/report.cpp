#include "irqsim/report.hpp"

#include <cstdio>
#include <fstream>

#include "irqsim/scenario.hpp"
#include "json.hpp"

namespace irqsim {

namespace {

using ojson = nlohmann::ordered_json;

ojson summary_json(const Summary& s) {
  return ojson{{"count", s.count},
               {"max_ns", s.max.ns},
               {"min_ns", s.min.ns},
               {"mean_us", s.mean_us},
               {"sigma_us", s.sigma_us}};
}

Summary summary_from_json(const ojson& v) {
  Summary s;
  s.count = v.at("count").get<std::uint64_t>();
  s.max = Duration{v.at("max_ns").get<std::uint64_t>()};
  s.min = Duration{v.at("min_ns").get<std::uint64_t>()};
  s.mean_us = v.at("mean_us").get<double>();
  s.sigma_us = v.at("sigma_us").get<double>();
  return s;
}

ojson histogram_json(const Histogram& h) {
  ojson buckets = ojson::array();
  for (const auto& [idx, count] : h.buckets)
    buckets.push_back(ojson::array({idx, count}));
  return ojson{{"bucket_width_ns", h.bucket_width.ns},
               {"total", h.total},
               {"underflow", h.underflow},
               {"overflow", h.overflow},
               {"buckets", buckets}};
}

Histogram histogram_from_json(const ojson& v) {
  Histogram h;
  h.bucket_width = Duration{v.at("bucket_width_ns").get<std::uint64_t>()};
  h.total = v.at("total").get<std::uint64_t>();
  h.underflow = v.at("underflow").get<std::uint64_t>();
  h.overflow = v.at("overflow").get<std::uint64_t>();
  for (const auto& pair : v.at("buckets"))
    h.buckets[pair.at(0).get<std::uint64_t>()] = pair.at(1).get<std::uint64_t>();
  return h;
}

}  // namespace

RunReport build_report(const Scenario& sc, const RawRun& run) {
  RunReport r;
  r.scenario = sc.name;
  r.arch = arch_name(sc.arch.variant);
  r.loaded = sc.load.any();
  r.seed = run.seed;
  r.overrun_count = run.overrun_count;
  r.sample_count = run.samples.size() - run.overrun_count;
  r.warmup_discarded = std::min<std::uint64_t>(sc.measure.warmup_discard,
                                               run.samples.size());

  StreamingSummary irq, cs;
  StreamingHistogram irq_h(sc.report.bucket_width), cs_h(sc.report.bucket_width);
  for (std::size_t i = 0; i < run.samples.size(); ++i) {
    const LatencySample& s = run.samples[i];
    if (i < r.warmup_discarded || s.overrun) continue;
    irq.add(s.irq_latency);
    cs.add(s.cs_delay);
    irq_h.add(s.irq_latency);
    cs_h.add(s.cs_delay);
  }
  r.irq_latency = irq.finish();
  r.cs_delay = cs.finish();
  r.irq_hist = irq_h.finish();
  r.cs_hist = cs_h.finish();
  r.config_echo = render_scenario(sc);
  return r;
}

std::string report_json(const RunReport& r) {
  ojson doc;
  doc["scenario"] = r.scenario;
  doc["arch"] = r.arch;
  doc["loaded"] = r.loaded;
  doc["seed"] = r.seed;
  doc["sample_count"] = r.sample_count;
  doc["overrun_count"] = r.overrun_count;
  doc["warmup_discarded"] = r.warmup_discarded;
  doc["irq_latency"] = summary_json(r.irq_latency);
  doc["cs_delay"] = summary_json(r.cs_delay);
  doc["irq_histogram"] = histogram_json(r.irq_hist);
  doc["cs_histogram"] = histogram_json(r.cs_hist);
  try {
    doc["config"] = ojson::parse(r.config_echo);
  } catch (const nlohmann::json::parse_error&) {
    doc["config"] = ojson::object();
  }
  return doc.dump(2) + "\n";
}

RunReport report_from_json(const std::string& text) {
  ojson doc;
  try {
    doc = ojson::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  RunReport r;
  try {
    r.scenario = doc.at("scenario").get<std::string>();
    r.arch = doc.at("arch").get<std::string>();
    r.loaded = doc.at("loaded").get<bool>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.sample_count = doc.at("sample_count").get<std::uint64_t>();
    r.overrun_count = doc.at("overrun_count").get<std::uint64_t>();
    r.warmup_discarded = doc.at("warmup_discarded").get<std::uint64_t>();
    r.irq_latency = summary_from_json(doc.at("irq_latency"));
    r.cs_delay = summary_from_json(doc.at("cs_delay"));
    r.irq_hist = histogram_from_json(doc.at("irq_histogram"));
    r.cs_hist = histogram_from_json(doc.at("cs_histogram"));
    if (doc.contains("config")) r.config_echo = doc.at("config").dump(2) + "\n";
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::bad_value, std::string("report document: ") + e.what());
  }
  return r;
}

std::string samples_csv(const std::vector<LatencySample>& samples) {
  std::string out = "n,irq_latency_ns,cs_delay_ns,overrun\n";
  char buf[96];
  for (const LatencySample& s : samples) {
    std::snprintf(buf, sizeof(buf), "%llu,%llu,%llu,%d\n",
                  static_cast<unsigned long long>(s.n),
                  static_cast<unsigned long long>(s.irq_latency.ns),
                  static_cast<unsigned long long>(s.cs_delay.ns), s.overrun ? 1 : 0);
    out += buf;
  }
  return out;
}

std::string histogram_csv(const Histogram& h) {
  std::string out = "bucket,lower_ns,upper_ns,count\n";
  char buf[128];
  for (const auto& [idx, count] : h.buckets) {
    std::snprintf(buf, sizeof(buf), "%llu,%llu,%llu,%llu\n",
                  static_cast<unsigned long long>(idx),
                  static_cast<unsigned long long>(idx * h.bucket_width.ns),
                  static_cast<unsigned long long>((idx + 1) * h.bucket_width.ns),
                  static_cast<unsigned long long>(count));
    out += buf;
  }
  return out;
}

std::string histogram_dat(const Histogram& h) {
  std::string out = "# lower_us count\n";
  char buf[96];
  for (const auto& [idx, count] : h.buckets) {
    std::snprintf(buf, sizeof(buf), "%.3f %llu\n",
                  static_cast<double>(idx * h.bucket_width.ns) / 1000.0,
                  static_cast<unsigned long long>(count));
    out += buf;
  }
  return out;
}

void write_file_atomic(const std::filesystem::path& p, const std::string& content) {
  std::filesystem::path tmp = p;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(Errc::config_error, "cannot write " + tmp.string());
    f.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!f) throw Error(Errc::config_error, "short write to " + tmp.string());
  }
  std::filesystem::rename(tmp, p);
}

}  // namespace irqsim
