#pragma once

#include <cstddef>
#include <functional>

namespace sohb {

/// min(hardware threads, $SOHB_THREADS) when the variable is a positive integer.
unsigned default_thread_count();

/// Splits [0, n) into contiguous chunks and runs body(begin, end) on up to
/// `threads` workers (0 = default_thread_count()). Chunks are disjoint, so
/// bodies writing only to their own index range need no synchronization.
/// Each worker receives at least `grain` indices.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t, std::size_t)>& body,
                  std::size_t grain = 64);

}  // namespace sohb
