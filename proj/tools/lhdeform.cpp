#include "lhdeform/cli/app.hpp"

int main(int argc, char** argv) { return lhdeform::cli::run(argc, argv); }
