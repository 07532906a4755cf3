#include <iostream>

#include "noetherq/cli.hpp"

int main(int argc, char** argv) { return noetherq::run_cli(argc, argv, std::cout, std::cerr); }
