#include <iostream>

#include "pcusum/cli.hpp"

int main(int argc, char** argv) { return pcusum::cli::run(argc, argv, std::cout, std::cerr); }
