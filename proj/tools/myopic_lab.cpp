#include <iostream>

#include "myopic/cli_io.hpp"

int main(int argc, char** argv) { return myopic::run_cli(argc, argv, std::cout, std::cerr); }
