#include <iostream>
#include <string>
#include <vector>

#include "capm/cli.hpp"

int main(int argc, char** argv) {
    const std::vector<std::string> args(argv, argv + argc);
    return capm::cli::run(args, std::cout, std::cerr);
}
