#include "dualcert/cli.hpp"

int main(int argc, char** argv) { return dualcert::cli::run(argc, argv); }
