// SPDX-License-Identifier: MIT
#include "cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return normbridge::cli::run(argc, argv, std::cout, std::cerr); }
