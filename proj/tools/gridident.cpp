#include <iostream>

#include "gridident/cli.hpp"

int main(int argc, char** argv) { return gridident::run_cli(argc, argv, std::cout, std::cerr); }
