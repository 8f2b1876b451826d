#include "zerod/cli.hpp"

int main(int argc, char** argv) { return zerod::cli::run_cli(argc, argv); }
