#include "ofd/pipeline.hpp"

int main(int argc, char** argv)
{
    return ofd::cli_main(argc, argv);
}
