#include <iostream>

#include "batik/cli.hpp"

int main(int argc, char** argv) { return batik::run_cli(argc, argv, std::cout, std::cerr); }
