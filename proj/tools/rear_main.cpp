#include "rear/cli.hpp"

int main(int argc, char** argv) { return rear::app::cli_main(argc, argv); }
