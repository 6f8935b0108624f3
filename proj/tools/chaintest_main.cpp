#include "chaintest/cli.hpp"

int main(int argc, char** argv) { return chaintest::run_cli(argc, argv); }
