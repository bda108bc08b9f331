#include <iostream>

#include "causalproc/cli.hpp"

int main(int argc, char** argv) { return causalproc::run_cli(argc, argv, std::cout, std::cerr); }
