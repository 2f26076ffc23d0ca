#include "pileup/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return pileup::cli::main_with_args(argc, argv, std::cout, std::cerr); }
