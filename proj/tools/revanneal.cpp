#include <revanneal/cli.hpp>

int main(int argc, char** argv) { return revanneal::cli::main(argc, argv); }
