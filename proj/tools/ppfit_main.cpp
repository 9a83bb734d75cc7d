#include <string>
#include <vector>

#include "ppfit/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return ppfit::cli::run(args);
}
