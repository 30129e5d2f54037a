#include "qiopa/cli.hpp"

int main(int argc, char** argv) { return qiopa::run_cli(argc, argv); }
