#include "gvm/cli.hpp"

int main(int argc, char** argv) { return gvm::cli::run(argc, argv); }
