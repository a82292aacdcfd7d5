#include "qgtlab/cli/commands.hpp"

#include <iostream>

int main(int argc, char** argv) { return qgtlab::cli::run_cli(argc, argv, std::cout, std::cerr); }
