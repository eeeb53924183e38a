#include "tclab/cli/commands.hpp"

int main(int argc, char** argv) { return tclab::cli::run(argc, argv); }
