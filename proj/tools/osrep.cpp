#include <osrep/cli.hpp>

int main(int argc, char** argv) { return osrep::run_cli(argc, argv); }
