#include "randop/harness.hpp"

int main(int argc, char** argv) { return randop::harness::cli_main(argc, argv); }
