#include "commands.hpp"

int main(int argc, char** argv) { return swarmctl::cli::run(argc, argv); }
