#include <iostream>
#include <string>
#include <vector>

#include "hyperlens/app.hpp"

int main(int argc, char** argv) {
  return hyperlens::app::run(std::vector<std::string>(argv, argv + argc), std::cout, std::cerr);
}
