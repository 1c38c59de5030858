#include "minratio/cli.hpp"

int main(int argc, char** argv) { return minratio::cli_main(argc, argv); }
