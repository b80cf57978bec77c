#include <iostream>

#include "binreg/cli.hpp"

int main(int argc, char** argv) { return binreg::run_cli(argc, argv, std::cout, std::cerr); }
