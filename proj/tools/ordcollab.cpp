#include <iostream>

#include "ordcollab/cli.hpp"

int main(int argc, char** argv) { return ordcollab::run_cli(argc, argv, std::cout, std::cerr); }
