#include "jke/cli/commands.hpp"

int main(int argc, char** argv) { return jke::cli::run_cli(argc, argv); }
