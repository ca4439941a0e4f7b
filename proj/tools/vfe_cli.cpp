#include "vfe/cli.hpp"

int main(int argc, char** argv) { return vfe::cli_main(argc, argv); }
