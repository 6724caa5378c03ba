#include <iostream>

#include "rbmci/cli.hpp"

int main(int argc, char** argv) { return rbmci::run_cli(argc, argv, std::cout, std::cerr); }
