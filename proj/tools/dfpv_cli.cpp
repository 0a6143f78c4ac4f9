#include <iostream>
#include <string>
#include <vector>

#include "dfpv/bench/cli.hpp"
#include "dfpv/numkit/runtime.hpp"

int main(int argc, char** argv) {
  dfpv::numkit::keep_large_blocks_on_heap();
  std::vector<std::string> args(argv + 1, argv + argc);
  return dfpv::bench::run_cli(args, std::cout, std::cerr);
}
