#include <iostream>

#include "edrlab/cli.hpp"

int main(int argc, char** argv) { return edrlab::cli::run(argc, argv, std::cout, std::cerr); }
