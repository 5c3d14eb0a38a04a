#include "cubeot/cli.hpp"

int main(int argc, char** argv) { return cubeot::cli::run(argc, argv); }
