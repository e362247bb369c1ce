#pragma once

#include <stdexcept>
#include <string>

namespace irqsim {

enum class Errc {
  past_due,           // event scheduled before the current clock
  bad_distribution,   // malformed distribution parameters
  unknown_line,       // IRQ line id not registered
  no_handler,         // dispatch to a line without a connected handler
  arch_mismatch,      // soft-mask op under direct dispatch
  unknown_semaphore,  // semaphore id not registered
  config_error,       // invalid measurement/load configuration
  empty_input,        // statistics over an empty sample set
  bad_width,          // non-positive histogram bucket width
  parse_error,        // scenario document is not valid JSON
  unknown_key,        // scenario contains a key the schema does not define
  bad_unit,           // duration without a recognized unit suffix
  bad_value,          // scenario value out of range or of the wrong type
  overflow,           // checked time arithmetic would wrap
  invalid_state,      // internal invariant violated
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

}  // namespace irqsim
