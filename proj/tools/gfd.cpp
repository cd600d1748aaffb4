#include "gfd/cli.hpp"

int main(int argc, char** argv) { return gfd::cli::dispatch(argc, argv); }
