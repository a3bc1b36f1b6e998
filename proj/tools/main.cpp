#include <iostream>

#include "actisiamese/cli.hpp"

int main(int argc, char** argv) {
    return actisiamese::cli_main(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
