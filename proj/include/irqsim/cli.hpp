#pragma once

namespace irqsim {

// Exit codes: 0 success, 1 runtime failure, 2 usage/configuration error.
int cli_main(int argc, char** argv);

}  // namespace irqsim
