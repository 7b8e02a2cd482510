#include "kgalign/cli.hpp"

int main(int argc, char** argv) { return kgalign::cli_main(argc, argv); }
