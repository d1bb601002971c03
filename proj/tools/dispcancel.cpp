#include <iostream>

#include "dispcancel/commands.hpp"

int main(int argc, char** argv) {
  return dispcancel::run_cli(argc, argv, std::cout, std::cerr);
}
