#include <iostream>
#include <string>
#include <vector>

#include "pdtn/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return pdtn::run_cli(args, std::cout, std::cerr);
}
