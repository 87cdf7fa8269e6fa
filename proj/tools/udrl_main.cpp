#include "udrl/harness/cli.hpp"

int main(int argc, char** argv) { return udrl::harness::run_cli(argc, argv); }
