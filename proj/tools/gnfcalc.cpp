#include <iostream>

#include "gnf/cli.hpp"

int main(int argc, char** argv) { return gnf::cli::run(argc, argv, std::cout, std::cerr); }
