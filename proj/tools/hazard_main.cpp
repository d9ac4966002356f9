#include "hazard/cli.hpp"

int main(int argc, char** argv) { return hazard::cli::run_cli(argc, argv); }
