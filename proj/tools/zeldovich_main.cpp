#include <iostream>

#include "zeldovich/cli.hpp"

int main(int argc, char** argv) { return zeldovich::run_cli(argc, argv, std::cout, std::cerr); }
