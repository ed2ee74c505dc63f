#include "voternet/cli.hpp"

int main(int argc, char** argv) { return voternet::cli_main(argc, argv); }
