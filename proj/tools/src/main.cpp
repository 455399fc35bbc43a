#include "robinlab_cli/cli.hpp"

int main(int argc, char** argv) { return robinlab::cli::run(argc, argv); }
