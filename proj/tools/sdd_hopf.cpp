#include "sddhopf/cli.hpp"

int main(int argc, char** argv) { return sddhopf::cli::main(argc, argv); }
