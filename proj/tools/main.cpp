#include <atomic>
#include <csignal>
#include <iostream>

#include "cli.hpp"

namespace {
std::atomic<bool> interrupted{false};
extern "C" void on_sigint(int) { interrupted = true; }
}  // namespace

int main(int argc, char** argv) {
  std::signal(SIGINT, on_sigint);
  std::vector<std::string> args(argv + 1, argv + argc);
  return sparsecs::cli::run(args, std::cout, std::cerr, &interrupted);
}
