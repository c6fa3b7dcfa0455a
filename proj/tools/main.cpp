#include <iostream>

#include "infconv/cli.hpp"

int main(int argc, char** argv) { return infconv::cli::main(argc, argv, std::cout, std::cerr); }
