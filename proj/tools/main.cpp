#include <iostream>

#include "hamrot/cli.hpp"

int main(int argc, char** argv) { return hamrot::run_cli(argc, argv, std::cout, std::cerr); }
