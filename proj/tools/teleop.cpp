#include "teleop/cli/app.hpp"

int main(int argc, char** argv) { return teleop::cli::run(argc, argv); }
