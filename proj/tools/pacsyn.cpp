#include <iostream>

#include "pacsyn/cli.hpp"

int main(int argc, char** argv) { return pacsyn::run_cli(argc, argv, std::cout, std::cerr); }
