#include "commands.hpp"

int main(int argc, char** argv) { return rlr::cli::run(argc, argv); }
