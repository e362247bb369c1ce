#pragma once

#include <compare>
#include <cstdint>

#include "irqsim/error.hpp"

namespace irqsim {

// Integer nanoseconds are the only time currency in the simulator. Reports
// convert to microseconds on output. All arithmetic is overflow-checked and
// throws instead of wrapping.

struct Duration {
  std::uint64_t ns = 0;

  static constexpr Duration nanos(std::uint64_t v) { return Duration{v}; }
  static constexpr Duration micros(std::uint64_t v) { return Duration{v * 1000u}; }
  static constexpr Duration millis(std::uint64_t v) { return Duration{v * 1000000u}; }

  auto operator<=>(const Duration&) const = default;

  Duration operator+(Duration other) const {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(ns, other.ns, &r))
      throw Error(Errc::overflow, "duration addition overflow");
    return Duration{r};
  }
  Duration& operator+=(Duration other) { return *this = *this + other; }

  Duration operator-(Duration other) const {
    if (other.ns > ns) throw Error(Errc::overflow, "duration subtraction underflow");
    return Duration{ns - other.ns};
  }

  Duration operator*(std::uint64_t k) const {
    std::uint64_t r = 0;
    if (__builtin_mul_overflow(ns, k, &r))
      throw Error(Errc::overflow, "duration multiplication overflow");
    return Duration{r};
  }

  double as_us() const { return static_cast<double>(ns) / 1000.0; }
};

struct Timestamp {
  std::uint64_t ns = 0;

  auto operator<=>(const Timestamp&) const = default;

  Timestamp operator+(Duration d) const {
    std::uint64_t r = 0;
    if (__builtin_add_overflow(ns, d.ns, &r))
      throw Error(Errc::overflow, "timestamp addition overflow");
    return Timestamp{r};
  }

  // Elapsed time since an earlier instant; throws if `earlier` is in the future.
  Duration operator-(Timestamp earlier) const {
    if (earlier.ns > ns) throw Error(Errc::overflow, "timestamp difference underflow");
    return Duration{ns - earlier.ns};
  }
};

namespace literals {
constexpr Duration operator""_ns(unsigned long long v) { return Duration{v}; }
constexpr Duration operator""_us(unsigned long long v) { return Duration{v * 1000u}; }
constexpr Duration operator""_ms(unsigned long long v) { return Duration{v * 1000000u}; }
}  // namespace literals

}  // namespace irqsim
