#include <iostream>

#include "fighter/cli.hpp"

int main(int argc, char** argv) {
    return fighter::cli::run({argv + 1, argv + argc}, std::cout, std::cerr);
}
