#include <iostream>

#include "parannot/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return parannot::run_cli(args, std::cout, std::cerr);
}
