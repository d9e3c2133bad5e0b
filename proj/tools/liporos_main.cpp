#include "liporos/cli.hpp"

int main(int argc, char** argv) { return liporos::cli::main(argc, argv); }
