#include <iostream>

#include "simion/cli.hpp"

int main(int argc, char** argv) { return simion::run_cli(argc, argv, std::cout, std::cerr); }
