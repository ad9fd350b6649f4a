#pragma once

#include <cstddef>
#include <functional>

namespace glyphforge {

// Worker cap for the whole process. Resolution order: explicit set (CLI
// --threads), GLYPHFORGE_THREADS, hardware concurrency.
void set_thread_count(int n);
int thread_count();

// Runs fn(i) for every i in [0, n). Tasks are statically partitioned so the
// set of (i -> worker) assignments is a pure function of n and the worker
// count; callers must write results into per-index slots, which keeps output
// independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

} // namespace glyphforge
