// revkg: build and query an ethics-aware knowledge graph from app reviews.

#include <iostream>
#include <string>
#include <vector>

#include "revkg/cli.h"

int main(int argc, char **argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return revkg::RunCli(args, std::cout, std::cerr);
}
