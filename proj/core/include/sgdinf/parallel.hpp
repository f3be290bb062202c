#pragma once

#include <cstddef>
#include <functional>

namespace sgdinf {

unsigned resolve_threads(unsigned requested) noexcept;

/// Calls body(i) for every i in [0, count) on up to `threads` workers.
/// Results must be written to per-index slots so that the outcome does not
/// depend on scheduling. If any call throws, the exception from the lowest
/// index is rethrown after all workers stop.
void parallel_for(std::size_t count, unsigned threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace sgdinf
