#include "symmwig/cli.hpp"

int main(int argc, char** argv) { return symmwig::cli::dispatch(argc, argv); }
