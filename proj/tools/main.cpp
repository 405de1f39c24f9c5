#include <iostream>

#include "hcat/cli.hpp"

int main(int argc, char** argv) { return hcat::main_entry(argc, argv, std::cout, std::cerr); }
