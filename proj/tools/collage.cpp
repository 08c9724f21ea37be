#include "collage/cli.hpp"

#include <iostream>

int main(int argc, char** argv) { return collage::cli::main_entry(argc, argv, std::cout, std::cerr); }
