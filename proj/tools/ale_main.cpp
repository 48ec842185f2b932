#include <iostream>
#include <string>
#include <vector>

#include "ale/cli/commands.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return ale::cli::run(args, std::cout, std::cerr);
}
