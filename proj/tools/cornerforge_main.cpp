#include "cornerforge/cli.hpp"

int main(int argc, char** argv) { return cornerforge::run_cli(argc, argv); }
