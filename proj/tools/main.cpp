#include "scaccel/cli.hpp"

int main(int argc, char** argv) { return scaccel::cli::run_main(argc, argv); }
