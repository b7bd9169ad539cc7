#include <iostream>

#include "ricsim/cli.hpp"

int main(int argc, char** argv) { return ricsim::run_cli(argc, argv, std::cout, std::cerr); }
