#include <iostream>

#include "cptshape/cli.hpp"

int main(int argc, char** argv)
{
    return cpt::run_command({argv + 1, argv + argc}, std::cout, std::cerr);
}
