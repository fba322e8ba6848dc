#include "cli.hpp"

int main(int argc, char** argv)
{
    return antclust::cli::dispatch(argc, argv);
}
