#include <iostream>

#include <ponedge/commands.hpp>

int main(int argc, char** argv)
{
    return ponedge::cli::main_entry(argc, argv, std::cout, std::cerr);
}
