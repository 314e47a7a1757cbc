#include "mhdk/cli.hpp"

int main(int argc, char** argv) { return mhdk::run_cli(argc, argv); }
