#include "srmimo/cli.hpp"

int main(int argc, char **argv)
{
    return srmimo::cli::main_entry(argc, argv);
}
