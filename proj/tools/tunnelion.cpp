#include "tunnelion/cli.hpp"

int main(int argc, char** argv) { return tunnelion::cli::run(argc, argv); }
