#include <iostream>

#include "molchan/cli.hpp"

int main(int argc, char** argv)
{
    return molchan::cli::run(argc, argv, std::cin, std::cout, std::cerr);
}
