#include "triopf/io.hpp"

int main(int argc, char** argv) { return triopf::cli_main(argc, argv); }
