#include <iostream>

#include "rdbp/cli.hpp"

int main(int argc, char** argv) { return rdbp::cli::run(argc, argv, std::cout, std::cerr); }
