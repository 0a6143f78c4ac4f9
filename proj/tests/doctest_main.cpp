#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include "dfpv/numkit/runtime.hpp"

int main(int argc, char** argv) {
  dfpv::numkit::keep_large_blocks_on_heap();
  doctest::Context ctx(argc, argv);
  return ctx.run();
}
