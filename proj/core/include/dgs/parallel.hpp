#pragma once

#include <cstddef>
#include <functional>

namespace dgs {

// Worker count used by data-parallel loops; 1 runs everything inline.
void set_thread_count(std::size_t threads);
std::size_t thread_count();

// Calls fn(i) for i in [0, count). Each index must own disjoint state, so the
// result does not depend on scheduling. The first exception is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

// Upper bound on sampler bank bytes resident at once. Larger bank sets are
// processed in chunks, each replaying the current pass span.
void set_sketch_memory_budget(std::size_t bytes);
std::size_t sketch_memory_budget();

}  // namespace dgs
