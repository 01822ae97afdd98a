#include <iostream>

#include "wfnet/cli.hpp"

int main(int argc, char** argv) { return wfnet::cli_main(argc, argv, std::cout, std::cerr); }
