#include <malloc.h>

#include <iostream>
#include <string>
#include <vector>

#include "cli.hpp"

int main(int argc, char** argv) {
  // Builders allocate tens of MB per tree; keep freed blocks on the heap
  // instead of returning them to the OS between replicates.
  mallopt(M_MMAP_THRESHOLD, 32 << 20);
  mallopt(M_TRIM_THRESHOLD, 512 << 20);
  std::vector<std::string> args(argv + 1, argv + argc);
  return freezetree::cli::run(args, std::cout, std::cerr);
}
