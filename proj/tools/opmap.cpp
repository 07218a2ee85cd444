#include <iostream>

#include "opmap/cli.hpp"

int main(int argc, char** argv) { return opmap::cli::run(argc, argv, std::cout, std::cerr); }
