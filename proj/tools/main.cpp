#include "vecproc/cli.hpp"

int main(int argc, char** argv) { return vecproc::run(argc, argv); }
