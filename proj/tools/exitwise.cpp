#include "exitwise/cli.hpp"

int main(int argc, char** argv) { return exitwise::run(argc, argv); }
