#include "irqsim/cli.hpp"

int main(int argc, char** argv) { return irqsim::cli_main(argc, argv); }
