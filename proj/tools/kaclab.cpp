// Command-line front end; see `kaclab --help`.

#include <iostream>
#include <string>
#include <vector>

#include "kaclab/experiment.hpp"

int main(int argc, char** argv)
{
    std::vector<std::string> args(argv + 1, argv + argc);
    return kaclab::main_entry(args, std::cout, std::cerr);
}
