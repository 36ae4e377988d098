#include "omega_cube/cli.hpp"

#include <iostream>

int main(int argc, char** argv) {
  return omega_cube::run(argc, argv, std::cout, std::cerr);
}
