#include <iostream>
#include <string>
#include <vector>

#include "bmparab/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return bmparab::cli::run(args, std::cout, std::cerr);
}
