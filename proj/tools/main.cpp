#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  const gasflow::cli::CommandResult result = gasflow::cli::run(argc, argv);
  if (!result.payload.empty()) std::cout << result.payload << '\n';
  return result.exit_code;
}
