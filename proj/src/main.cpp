#include <iostream>

#include "isodrum/cli.hpp"

int main(int argc, char** argv) {
  return isodrum::run_cli(argc, argv, std::cout, std::cerr);
}
