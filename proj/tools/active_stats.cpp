#include "active/cli.hpp"

int main(int argc, char** argv) { return active::cli::run(argc, argv); }
