#include <cstdlib>
#include <iostream>

#include "run_spec.hpp"

int main(int argc, char** argv) {
  using namespace irs::cli;
  std::map<std::string, std::string> env;
  if (const char* v = std::getenv(kOutDirEnv)) env[kOutDirEnv] = v;

  RunSpec spec;
  try {
    spec = parse_run_spec({argv + 1, argv + argc}, env);
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (spec.show_help) {
    std::cout << spec.help_text;
    return kSuccess;
  }
  return execute(spec, std::cout, std::cerr);
}
