#include "irqsim/dist.hpp"

#include <cmath>

#include "irqsim/error.hpp"

namespace irqsim {

void DistributionSpec::validate() const {
  switch (kind) {
    case Kind::constant:
      return;
    case Kind::uniform:
      if (a > b) throw Error(Errc::bad_distribution, "uniform requires lo <= hi");
      return;
    case Kind::shifted_exp:
      if (b <= a)
        throw Error(Errc::bad_distribution, "shifted_exp requires mean > min");
      return;
  }
  throw Error(Errc::bad_distribution, "unknown distribution kind");
}

std::optional<Duration> DistributionSpec::max_support() const {
  switch (kind) {
    case Kind::constant: return a;
    case Kind::uniform: return b;
    case Kind::shifted_exp: return std::nullopt;
  }
  return std::nullopt;
}

Duration DistributionSpec::min_support() const { return a; }

double DistributionSpec::mean_ns() const {
  switch (kind) {
    case Kind::constant: return static_cast<double>(a.ns);
    case Kind::uniform: return (static_cast<double>(a.ns) + static_cast<double>(b.ns)) / 2.0;
    case Kind::shifted_exp: return static_cast<double>(b.ns);
  }
  return 0.0;
}

Duration DistributionSpec::sample(Rng& rng) const {
  switch (kind) {
    case Kind::constant:
      return a;
    case Kind::uniform: {
      std::uint64_t span = b.ns - a.ns;  // inclusive bounds
      if (span == std::uint64_t(-1)) return Duration{rng.next()};
      return Duration{a.ns + rng.bounded(span + 1)};
    }
    case Kind::shifted_exp: {
      // min + Exp(mean - min); u in (0, 1] keeps the log finite.
      double u = 1.0 - rng.next_unit();
      double scale = static_cast<double>(b.ns - a.ns);
      double v = -scale * std::log(u);
      return Duration{a.ns + static_cast<std::uint64_t>(std::llround(v))};
    }
  }
  throw Error(Errc::bad_distribution, "unknown distribution kind");
}

std::string DistributionSpec::describe() const {
  switch (kind) {
    case Kind::constant:
      return "constant(" + std::to_string(a.ns) + "ns)";
    case Kind::uniform:
      return "uniform(" + std::to_string(a.ns) + "ns, " + std::to_string(b.ns) + "ns)";
    case Kind::shifted_exp:
      return "shifted_exp(min=" + std::to_string(a.ns) + "ns, mean=" +
             std::to_string(b.ns) + "ns)";
  }
  return "?";
}

}  // namespace irqsim
