#include "commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return crown::cli::run_cli(argc, argv, std::cin, std::cout, std::cerr); }
