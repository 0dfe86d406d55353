#include <iostream>

#include "lightray/cli/app.hpp"

int main(int argc, char** argv) { return lightray::cli::run_cli(argc, argv, std::cout, std::cerr); }
