#pragma once

#include <optional>
#include <string>

#include "irqsim/rng.hpp"
#include "irqsim/time.hpp"

namespace irqsim {

// The three duration distributions the scenario schema offers: a constant,
// a uniform interval, and a shifted exponential for heavy-tailed load.
struct DistributionSpec {
  enum class Kind { constant, uniform, shifted_exp };

  Kind kind = Kind::constant;
  Duration a{};  // constant: value; uniform: lo; shifted_exp: min
  Duration b{};  // uniform: hi; shifted_exp: mean

  static DistributionSpec constant(Duration v) {
    return DistributionSpec{Kind::constant, v, Duration{}};
  }
  static DistributionSpec uniform(Duration lo, Duration hi) {
    return DistributionSpec{Kind::uniform, lo, hi};
  }
  static DistributionSpec shifted_exp(Duration min, Duration mean) {
    return DistributionSpec{Kind::shifted_exp, min, mean};
  }

  // Throws BadDistribution on malformed parameters.
  void validate() const;

  // Upper bound of the support; nullopt for the unbounded exponential tail.
  std::optional<Duration> max_support() const;

  Duration min_support() const;

  // Expected value, in nanoseconds.
  double mean_ns() const;

  Duration sample(Rng& rng) const;

  bool operator==(const DistributionSpec&) const = default;

  std::string describe() const;
};

// A distribution bound to its own substream.
struct Sampler {
  DistributionSpec spec;
  Rng rng;

  Sampler() = default;
  Sampler(DistributionSpec s, Rng r) : spec(s), rng(r) { spec.validate(); }

  Duration draw() { return spec.sample(rng); }
};

}  // namespace irqsim
