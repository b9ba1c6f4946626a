#include "cavityspec/cli.hpp"

int main(int argc, char** argv) { return cavityspec::cli::run(argc, argv); }
