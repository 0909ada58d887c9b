#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "microdep/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  std::error_code ec;
  auto cwd = std::filesystem::current_path(ec);
  return microdep::cli::run(args, cwd, std::cout, std::cerr);
}
