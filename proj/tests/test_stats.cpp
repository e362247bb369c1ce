#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "irqsim/error.hpp"
#include "irqsim/stats.hpp"

using namespace irqsim;

namespace {

// Plain two-pass mean/deviation used as the oracle for the streaming path.
struct TwoPass {
  std::uint64_t count = 0;
  std::uint64_t max_ns = 0, min_ns = 0;
  double mean_us = 0, sigma_us = 0;
};

TwoPass two_pass(const std::vector<Duration>& xs) {
  TwoPass r;
  r.count = xs.size();
  r.min_ns = UINT64_MAX;
  double sum = 0;
  for (Duration d : xs) {
    r.max_ns = std::max(r.max_ns, d.ns);
    r.min_ns = std::min(r.min_ns, d.ns);
    sum += static_cast<double>(d.ns);
  }
  double mean_ns = sum / static_cast<double>(xs.size());
  double acc = 0;
  for (Duration d : xs) {
    double dev = static_cast<double>(d.ns) - mean_ns;
    acc += dev * dev;
  }
  r.mean_us = mean_ns / 1000.0;
  r.sigma_us = std::sqrt(acc / static_cast<double>(xs.size())) / 1000.0;
  return r;
}

double rel_err(double a, double b) {
  double scale = std::max({std::fabs(a), std::fabs(b), 1.0});
  return std::fabs(a - b) / scale;
}

}  // namespace

TEST_CASE("streaming summary matches a two-pass computation on 100 random sets") {
  std::mt19937_64 rng(2024);
  for (int set = 0; set < 100; ++set) {
    // Sizes span 1..1e6; values span several regimes including huge offsets,
    // which is where naive one-pass variance loses digits.
    std::size_t n;
    switch (set % 4) {
      case 0: n = 1 + rng() % 10; break;
      case 1: n = 1 + rng() % 1000; break;
      case 2: n = 1 + rng() % 100000; break;
      default: n = 1000000; break;
    }
    std::uint64_t base = (set % 3 == 0) ? 10000000000ull : 1000;
    std::uint64_t spread = 1 + rng() % 500000;
    std::vector<Duration> xs;
    xs.reserve(n);
    StreamingSummary ss;
    for (std::size_t i = 0; i < n; ++i) {
      Duration d{base + rng() % spread};
      xs.push_back(d);
      ss.add(d);
    }
    Summary got = ss.finish();
    TwoPass want = two_pass(xs);
    REQUIRE(got.count == want.count);
    REQUIRE(got.max.ns == want.max_ns);
    REQUIRE(got.min.ns == want.min_ns);
    REQUIRE(rel_err(got.mean_us, want.mean_us) < 1e-9);
    REQUIRE(rel_err(got.sigma_us, want.sigma_us) < 1e-9);
  }
}

TEST_CASE("summarize agrees with the streaming accumulator") {
  std::vector<Duration> xs{Duration{1200}, Duration{1500}, Duration{900},
                           Duration{2100}, Duration{1500}};
  Summary a = summarize(xs);
  StreamingSummary ss;
  for (Duration d : xs) ss.add(d);
  Summary b = ss.finish();
  CHECK(a.count == b.count);
  CHECK(a.max.ns == b.max.ns);
  CHECK(a.min.ns == b.min.ns);
  CHECK(a.mean_us == doctest::Approx(b.mean_us).epsilon(1e-12));
  CHECK(a.sigma_us == doctest::Approx(b.sigma_us).epsilon(1e-12));
  CHECK(a.max.ns == 2100);
  CHECK(a.min.ns == 900);
  CHECK(a.mean_us == doctest::Approx(1.44));
}

TEST_CASE("empty series cannot be summarized") {
  StreamingSummary ss;
  CHECK_THROWS_AS(ss.finish(), Error);
  try {
    ss.finish();
  } catch (const Error& e) {
    CHECK(e.code() == Errc::empty_input);
  }
  CHECK_THROWS_AS(summarize({}), Error);
}

TEST_CASE("single sample has zero deviation") {
  StreamingSummary ss;
  ss.add(Duration{5000});
  Summary s = ss.finish();
  CHECK(s.count == 1);
  CHECK(s.mean_us == doctest::Approx(5.0));
  CHECK(s.sigma_us == doctest::Approx(0.0));
  CHECK(s.max.ns == 5000);
  CHECK(s.min.ns == 5000);
}

TEST_CASE("histogram conserves every sample across 20 random sets") {
  std::mt19937_64 rng(77);
  for (int set = 0; set < 20; ++set) {
    std::size_t n = 1 + rng() % 200000;
    Duration width{100 + rng() % 5000};
    StreamingHistogram sh(width);
    std::vector<Duration> xs;
    for (std::size_t i = 0; i < n; ++i) {
      Duration d{rng() % 10000000};
      xs.push_back(d);
      sh.add(d);
    }
    Histogram h = sh.finish();
    std::uint64_t in_buckets = 0;
    for (const auto& [idx, c] : h.buckets) in_buckets += c;
    REQUIRE(h.total == n);
    REQUIRE(h.underflow + in_buckets + h.overflow == n);
    Histogram h2 = histogram(xs, width);
    REQUIRE(h2.buckets == h.buckets);
    REQUIRE(h2.total == h.total);
  }
}

TEST_CASE("histogram boundary samples land in the upper bucket") {
  std::vector<Duration> xs{Duration{0}, Duration{999}, Duration{1000}, Duration{1001},
                           Duration{2000}};
  Histogram h = histogram(xs, Duration{1000});
  CHECK(h.buckets.at(0) == 2);  // 0 and 999
  CHECK(h.buckets.at(1) == 2);  // 1000 and 1001
  CHECK(h.buckets.at(2) == 1);  // 2000
  CHECK(h.underflow == 0);
  CHECK(h.overflow == 0);
}

TEST_CASE("zero bucket width is rejected") {
  CHECK_THROWS_AS(StreamingHistogram(Duration{0}), Error);
  try {
    StreamingHistogram bad{Duration{0}};
  } catch (const Error& e) {
    CHECK(e.code() == Errc::bad_width);
  }
}

TEST_CASE("comparison table groups idle before loaded and formats microseconds") {
  RunReport idle_direct;
  idle_direct.scenario = "direct-idle";
  idle_direct.arch = "direct";
  idle_direct.loaded = false;
  idle_direct.irq_latency = Summary{10, Duration{1400}, Duration{1200}, 1.3, 0.1};
  idle_direct.cs_delay = Summary{10, Duration{2400}, Duration{2000}, 2.2, 0.1};
  RunReport loaded_virt;
  loaded_virt.scenario = "virtualized-loaded";
  loaded_virt.arch = "virtualized";
  loaded_virt.loaded = true;
  loaded_virt.irq_latency = Summary{10, Duration{123300}, Duration{1600}, 4.1, 5.4};
  loaded_virt.cs_delay = Summary{10, Duration{132200}, Duration{8000}, 12.8, 6.5};

  std::string table = render_table({loaded_virt, idle_direct});
  CHECK(table.find("Interrupt Latency") != std::string::npos);
  CHECK(table.find("Context Switching") != std::string::npos);
  CHECK(table.find("(all times in µs)") != std::string::npos);
  std::size_t idle_hdr = table.find("--- Idle System ---");
  std::size_t loaded_hdr = table.find("--- Loaded System ---");
  REQUIRE(idle_hdr != std::string::npos);
  REQUIRE(loaded_hdr != std::string::npos);
  CHECK(idle_hdr < loaded_hdr);
  std::size_t row_idle = table.find("direct-idle");
  std::size_t row_loaded = table.find("virtualized-loaded");
  REQUIRE(row_idle != std::string::npos);
  REQUIRE(row_loaded != std::string::npos);
  CHECK(row_idle < loaded_hdr);
  CHECK(row_loaded > loaded_hdr);
  CHECK(table.find("123.3") != std::string::npos);  // max in microseconds
  CHECK(table.find("4.1") != std::string::npos);
}
