#include "cli.hpp"

int main(int argc, char** argv) { return netprice::cli::run_cli(argc, argv); }
