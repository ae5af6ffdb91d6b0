#include <iostream>

#include "favard/cli/commands.hpp"

int main(int argc, char** argv) { return favard::cli::main_entry(argc, argv, std::cout, std::cerr); }
