#include "ageg/cli.hpp"

int main(int argc, char** argv) { return ageg::cli::run(argc, argv); }
