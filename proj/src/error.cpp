#include "irqsim/error.hpp"

namespace irqsim {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::past_due: return "PastDue";
    case Errc::bad_distribution: return "BadDistribution";
    case Errc::unknown_line: return "UnknownLine";
    case Errc::no_handler: return "NoHandler";
    case Errc::arch_mismatch: return "ArchMismatch";
    case Errc::unknown_semaphore: return "UnknownSemaphore";
    case Errc::config_error: return "ConfigError";
    case Errc::empty_input: return "EmptyInput";
    case Errc::bad_width: return "BadWidth";
    case Errc::parse_error: return "ParseError";
    case Errc::unknown_key: return "UnknownKey";
    case Errc::bad_unit: return "BadUnit";
    case Errc::bad_value: return "BadValue";
    case Errc::overflow: return "Overflow";
    case Errc::invalid_state: return "InvalidState";
  }
  return "Error";
}

}  // namespace irqsim
