#include "cli.hpp"

int main(int argc, char** argv) { return hmevp::cli::main(argc, argv); }
