#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mgcn::cli::run(argc, argv, std::cout, std::cerr); }
