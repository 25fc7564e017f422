#include <iostream>

#include "adcs/cli.hpp"

int main(int argc, char **argv) { return adcs::run_cli(argc, argv, std::cout, std::cerr); }
