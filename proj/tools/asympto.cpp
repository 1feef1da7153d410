#include "asympto/cli.hpp"

int main(int argc, char** argv) { return asympto::cli::run(argc, argv); }
