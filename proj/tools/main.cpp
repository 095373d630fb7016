#include "stresscert/cli.hpp"

int main(int argc, char** argv) { return stresscert::run_cli(argc, argv); }
