#include <iostream>

#include "ddk/cli/commands.hpp"

int main(int argc, char** argv) { return ddk::cli::run_cli(argc, argv, std::cout, std::cerr); }
