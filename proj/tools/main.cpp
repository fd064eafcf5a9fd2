#include "readmit/cli.hpp"

int main(int argc, char** argv) { return readmit::cli::run(argc, argv); }
