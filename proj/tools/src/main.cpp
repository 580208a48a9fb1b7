#include <iostream>

#include "mbsel_cli/commands.hpp"

int main(int argc, char** argv) { return mbsel::cli::run(argc, argv, std::cout, std::cerr); }
