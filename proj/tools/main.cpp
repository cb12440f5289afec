#include "spreadrank/cli.hpp"

int main(int argc, char** argv) { return spreadrank::cli::dispatch(argc, argv); }
