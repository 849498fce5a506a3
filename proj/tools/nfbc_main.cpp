#include "nfbc/cli_commands.hpp"

int main(int argc, char** argv) { return nfbc::run_cli(argc, argv); }
