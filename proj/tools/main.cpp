#include <iostream>

#include "rknn/cli.hpp"

int main(int argc, char** argv) { return rknn::run_cli(argc, argv, std::cout, std::cerr); }
