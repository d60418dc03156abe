#include <iostream>

#include "ampforge/cli.hpp"

int main(int argc, char** argv) { return ampforge::run_cli(argc, argv, std::cout, std::cerr); }
