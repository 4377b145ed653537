#include <iostream>

#include "hacsim/cli.hpp"

int main(int argc, char** argv) { return hacsim::run_cli(argc, argv, std::cout, std::cerr); }
