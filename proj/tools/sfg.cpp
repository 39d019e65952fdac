#include <iostream>

#include "sfg/cli.hpp"

int main(int argc, char** argv) { return sfg::run_cli(argc, argv, std::cout, std::cerr); }
