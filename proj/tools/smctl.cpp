#include <iostream>
#include <string>
#include <vector>

#include "sm/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return sm::run_smctl(args, std::cout, std::cerr);
}
