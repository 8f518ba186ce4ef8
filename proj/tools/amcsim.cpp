#include <iostream>

#include "amcsim/cli.hpp"

int main(int argc, char** argv) { return amcsim::run_cli(argc, argv, std::cout, std::cerr); }
