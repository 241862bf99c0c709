// SPDX-License-Identifier: Apache-2.0
#include <iostream>

#include "vf/cli.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return vf::cli::run(args, std::cout, std::cerr);
}
