#include <iostream>
#include <string>
#include <vector>

#include "elk/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    return elk::cli::run(args, std::cout, std::cerr);
}
