#include <iostream>

#include "qac/cli.hpp"

int main(int argc, char** argv) { return qac::cli::run(argc, argv, std::cout, std::cerr); }
