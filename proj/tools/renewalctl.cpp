#include "renewalctl/app.hpp"

int main(int argc, char** argv) { return renewalctl::run_cli(argc, argv); }
