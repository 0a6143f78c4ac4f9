#include "dfpv/numkit/runtime.hpp"

#if defined(__GLIBC__)
#include <malloc.h>
#endif

namespace dfpv::numkit {

void keep_large_blocks_on_heap() {
#if defined(__GLIBC__)
  mallopt(M_MMAP_THRESHOLD, 64 << 20);
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
}

}  // namespace dfpv::numkit
