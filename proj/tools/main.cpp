#include <iostream>

#include "relayq_cli/commands.hpp"

int main(int argc, char** argv) { return relayq::cli::run_command(argc, argv, std::cout, std::cerr); }
