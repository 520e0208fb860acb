#include "mullkit/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return mullkit::run_cli(argc, argv, std::cout, std::cerr); }
