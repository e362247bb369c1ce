#pragma once

#include <string>

#include "irqsim/harness.hpp"

namespace irqsim {

// Scenario file format: strict JSON with every duration written as a string
// with an explicit unit suffix ("250us", "1300ns", "1.5ms"). Unknown keys are
// hard errors. See docs/scenario-schema.md for the full schema.

// Parses and semantically validates a scenario document.
Scenario parse_scenario(const std::string& text);

// Renders the normalized form (defaults filled in, fixed key order). Feeding
// the result back through parse_scenario yields an identical scenario.
std::string render_scenario(const Scenario& sc);

// "250us" -> 250000ns. Throws BadUnit for a missing/unknown suffix, BadValue
// for a malformed or negative number.
Duration parse_duration(const std::string& text);

std::string format_duration(Duration d);

}  // namespace irqsim
