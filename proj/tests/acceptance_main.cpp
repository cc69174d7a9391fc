// Runs the nine acceptance criteria at full sample counts, one line each.
#include "opspace/acceptance.hpp"

#include <cstdlib>
#include <cstring>
#include <iostream>

int main(int argc, char** argv) {
  opspace::AcceptanceOptions opts;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--quick") == 0)
      opts.quick = true;
    else
      opts.only.push_back(std::atoi(argv[i]));
  }
  int failed = 0;
  for (const auto& r : opspace::run_acceptance(opts)) {
    std::cout << opspace::format_line(r) << std::endl;
    if (!r.pass) ++failed;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed")
            << std::endl;
  return failed == 0 ? 0 : 1;
}
