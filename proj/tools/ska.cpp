#include <iostream>

#include "ska/cli/commands.hpp"

int main(int argc, char** argv) { return ska::cli::run_cli(argc, argv, std::cout, std::cerr); }
