#include <iostream>

#include "hsiu/cli.hpp"

int main(int argc, char** argv) { return hsiu::cli::main(argc, argv, std::cout, std::cerr); }
