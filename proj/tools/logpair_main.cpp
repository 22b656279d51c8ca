#include "logpair/cli.hpp"

int main(int argc, char** argv) { return logpair::cli::run_cli(argc, argv); }
