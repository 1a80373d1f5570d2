#include "mevr/cli.hpp"

int main(int argc, char** argv) { return mevr::cli::run(argc, argv); }
