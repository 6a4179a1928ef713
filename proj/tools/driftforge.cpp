#include <string>
#include <vector>

#include "driftforge/cli.hpp"

int main(int argc, char** argv) {
  return driftforge::cli::run(std::vector<std::string>(argv + 1, argv + argc));
}
