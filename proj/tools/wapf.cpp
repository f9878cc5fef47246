#include <iostream>

#include "wapf/cli.hpp"

int main(int argc, char** argv) { return wapf::cli_main(argc, argv, std::cout, std::cerr); }
