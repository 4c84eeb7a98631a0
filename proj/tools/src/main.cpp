#include <iostream>

#include "radwalk/cli/cli.hpp"

int main(int argc, char** argv) { return radwalk::cli::run(argc, argv, std::cout, std::cerr); }
