#pragma once

#include <cstdint>
#include <functional>

namespace ranndy {

// Worker count: hardware concurrency, capped by the RANNDY_THREADS
// environment variable when set.
int worker_count();

// Runs chunk_fn(begin, end) over contiguous chunks of [begin, end). Each index
// must write only its own output slots, so results do not depend on the
// worker count. The first exception thrown by a chunk is rethrown.
void parallel_for(std::int64_t begin, std::int64_t end,
                  const std::function<void(std::int64_t, std::int64_t)>& chunk_fn);

} // namespace ranndy
