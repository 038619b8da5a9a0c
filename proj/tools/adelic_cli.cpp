#include "adelic/cli.hpp"

int main(int argc, char** argv) { return adelic::run(argc, argv); }
