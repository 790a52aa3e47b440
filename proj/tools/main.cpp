#include "cli_app.hpp"

int main(int argc, char** argv) { return angemb::cli::run(argc, argv); }
