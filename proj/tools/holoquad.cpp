#include <iostream>

#include "holoquad/io/cli.hpp"

int main(int argc, char** argv) { return holoquad::io::run_cli(argc, argv, std::cout, std::cerr); }
