// Acceptance gate on the reference instance p = q = K = 1, L = 5: one line
// per criterion, nonzero exit if any fails.

#include <unistd.h>

#include <filesystem>
#include <iostream>

#include "bif/acceptance.hpp"

int main() {
  namespace fs = std::filesystem;
  const auto scratch = fs::temp_directory_path() / ("bif_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  const auto results = bif::run_acceptance(bif::RunConfig{}, scratch, std::cout);
  fs::remove_all(scratch);
  const bool ok = bif::all_passed(results);
  std::cout << (ok ? "all criteria passed" : "some criteria failed") << std::endl;
  return ok ? 0 : 1;
}
