#pragma once

namespace dfpv::numkit {

// Training allocates and frees the same few hundred-KB matrices thousands of times. glibc serves
// blocks that size with fresh mmaps, so every step pays page faults; raising the thresholds keeps
// them on the heap. No-op off glibc. Call once at startup.
void keep_large_blocks_on_heap();

}  // namespace dfpv::numkit
