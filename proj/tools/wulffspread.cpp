#include <iostream>

#include "wulffspread/cli.hpp"

int main(int argc, char** argv) { return wulffspread::run_cli(argc, argv, std::cout, std::cerr); }
