#include "nprach/cli.hpp"

#include <iostream>

int main(int argc, char** argv)
{
    return nprach::run_cli(argc, argv, std::cout, std::cerr);
}
