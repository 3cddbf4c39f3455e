#include <iostream>

#include "qsnom/cli.hpp"

int main(int argc, char** argv)
{
    return qsnom::cli::run(argc, argv, std::cout, std::cerr);
}
