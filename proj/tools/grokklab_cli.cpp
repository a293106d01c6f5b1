#include "grokklab/exp_runner.hpp"

int main(int argc, char** argv) { return grokk::runner::cli_main(argc, argv); }
