#include <iostream>

#include "tlsbath/cli.hpp"

int main(int argc, char** argv) { return tlsbath::run_cli(argc, argv, std::cout, std::cerr); }
