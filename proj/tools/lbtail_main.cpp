#include <iostream>

#include "lbtail/cli.hpp"

int main(int argc, char** argv) {
    return lbtail::run_cli(argc, argv, std::cout, std::cerr);
}
