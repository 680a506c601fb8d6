#include <iostream>

#include "pcube/cli.hpp"

int main(int argc, char** argv) {
    return pcube::cli::run(argc, argv, std::cout, std::cerr);
}
