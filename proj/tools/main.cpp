#include <iostream>

#include "app.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv, argv + argc);
  return ens::app::run(args, std::cout, std::cerr).exit_code;
}
