#include "eqsim/cli.hpp"

int main(int argc, char** argv) { return eqsim::cli::run_cli(argc, argv); }
