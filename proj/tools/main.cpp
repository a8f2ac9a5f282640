#include <iostream>

#include "zscli/commands.hpp"

int main(int argc, char** argv) { return zscli::run_cli(argc, argv, std::cout, std::cerr); }
