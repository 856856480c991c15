#include "hawkes/cli.hpp"

int main(int argc, char** argv) { return hawkes::cli::dispatch(argc, argv); }
