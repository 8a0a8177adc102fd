#include "hambubble/cli.hpp"

int main(int argc, char** argv) { return hambubble::cli::run(argc, argv); }
