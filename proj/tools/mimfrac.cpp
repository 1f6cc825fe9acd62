#include <iostream>

#include "mimfrac/commands.hpp"

int main(int argc, char** argv) { return mimfrac::run_cli(argc, argv, std::cout, std::cerr); }
