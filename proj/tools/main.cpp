#include "cli.hpp"

int main(int argc, char** argv) { return approxflow::cli::run(argc, argv); }
