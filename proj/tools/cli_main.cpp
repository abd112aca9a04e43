#include <iostream>

#include "audiolib/client/cli.hpp"

int main(int argc, char** argv) {
  audiolib::client::CliContext ctx{std::cout, std::cerr, &std::cin, std::nullopt, {}};
  return audiolib::client::run_cli(std::vector<std::string>(argv + 1, argv + argc), ctx);
}
