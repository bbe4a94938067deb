#include <iostream>

#include "transverse/cli.hpp"

int main(int argc, char** argv) { return transverse::cli::run(argc, argv, std::cout, std::cerr); }
