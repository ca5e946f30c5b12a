#include "framesel/cli.hpp"

int main(int argc, char** argv) { return framesel::cli::run(argc, argv); }
