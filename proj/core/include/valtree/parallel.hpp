#pragma once

#include <cstddef>
#include <functional>

namespace valtree {

// 0 selects the hardware concurrency.
std::size_t resolve_threads(std::size_t requested);

// Runs body(i) for i in [0, count) on up to `threads` workers. Work items
// must write only to their own slot; the first exception is rethrown.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace valtree
