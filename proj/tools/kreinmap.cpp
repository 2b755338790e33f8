#include "kreinmap_cli.hpp"

int main(int argc, char** argv) { return kreinmap::cli::run(argc, argv); }
