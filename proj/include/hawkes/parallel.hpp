#pragma once

#include <cstddef>
#include <functional>

namespace hawkes {

// Worker-pool width used by batch simulation, multi-starts, and experiment
// repetitions. Defaults to HAWKES_THREADS when set, otherwise the hardware
// concurrency. Results never depend on the width: each index does pure,
// seeded work and outputs land in index order.
std::size_t thread_count();
void set_thread_count(std::size_t n);

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace hawkes
