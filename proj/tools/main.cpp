#include "varorb/cli.hpp"

int main(int argc, char** argv)
{
    return varorb::run_cli(argc, argv);
}
