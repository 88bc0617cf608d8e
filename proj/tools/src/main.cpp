#include <iostream>

#include "hflow_cli/commands.hpp"

int main(int argc, char** argv) {
  return hflow::cli::main_entry(argc, argv, std::cout, std::cerr);
}
