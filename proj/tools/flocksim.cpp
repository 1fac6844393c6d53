#include <iostream>

#include "flocksim/cli.hpp"

int main(int argc, char** argv) { return flocksim::run_cli(argc, argv, std::cout, std::cerr); }
