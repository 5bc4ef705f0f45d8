#pragma once

#include <cstddef>
#include <functional>

namespace tei {

// Worker count: TV_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

// Runs body(i) for i in [0, count). Each index must write only its own output
// slot; results are then independent of the schedule.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace tei
