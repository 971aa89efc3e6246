#include <iostream>

#include "homethreat/cli.hpp"

int main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return homethreat::cli::run(args, std::cin, std::cout, std::cerr, homethreat::cli::detect_environment());
}
