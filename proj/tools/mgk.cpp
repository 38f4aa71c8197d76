#include <iostream>

#include "mgk/cli.hpp"

int main(int argc, char** argv) {
  return mgk::cli::run(std::vector<std::string>(argv + 1, argv + argc), std::cout, std::cerr);
}
