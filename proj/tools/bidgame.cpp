#include "bidding/cli.hpp"

int main(int argc, char** argv) { return bidding::cli::run(argc, argv); }
