#include "orbmod/cli.hpp"

int main(int argc, char** argv) { return orbmod::run_cli(argc, argv); }
