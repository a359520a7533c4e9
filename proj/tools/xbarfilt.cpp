#include "xbarfilt/cli.hpp"

int main(int argc, char** argv) { return xbarfilt::cli::main(argc, argv); }
