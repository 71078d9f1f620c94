#include "selguide/cli.hpp"

int main(int argc, char** argv) { return selguide::cli_main(argc, argv); }
