#pragma once

#include <string>
#include <vector>

#include "irqsim/harness.hpp"

namespace irqsim {

// The four built-in benchmark configurations: each architecture measured on
// an otherwise idle system and under the standard interrupt/IO load, all at
// the same seed so the architectures see the same load sequence.
std::vector<std::string> preset_names();

bool is_preset(const std::string& name);

// Throws ConfigError for an unknown name.
Scenario preset(const std::string& name);

}  // namespace irqsim
