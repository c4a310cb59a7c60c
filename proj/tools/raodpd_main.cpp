#include "raodpd/cli.hpp"

int main(int argc, char** argv) { return raodpd::cli::run(argc, argv); }
