#include <iostream>

#include "mfc/cli.hpp"

int main(int argc, char** argv) { return mfc::cli::main(argc, argv, std::cout, std::cerr); }
