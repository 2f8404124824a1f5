#include <iostream>

#include "acsolve/cli.h"

int main(int argc, char** argv) {
  return acsolve::run_cli(argc, argv, std::cout, std::cerr);
}
