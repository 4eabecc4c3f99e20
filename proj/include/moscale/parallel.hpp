#pragma once

#include <cstddef>
#include <functional>

namespace moscale {

// Worker count: hardware concurrency, capped by MOSCALE_THREADS when set.
std::size_t thread_count();

// Runs fn(i) for i in [0, n). Each index writes only its own output slot, so
// results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace moscale
