#include "cli.hpp"

int main(int argc, char** argv) { return sentlab::app::run_cli(argc, argv); }
