#include "tsptw/cli.hpp"

int main(int argc, char** argv) { return tsptw::cli::run(argc, argv); }
