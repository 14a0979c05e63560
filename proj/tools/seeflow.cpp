#include "seeflow/cli.hpp"

int main(int argc, char** argv) { return seeflow::cli::run_cli(argc, argv); }
