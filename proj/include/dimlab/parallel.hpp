#pragma once

#include <cstddef>
#include <functional>

namespace dimlab {

/// Worker count used by parallel loops; defaults to hardware concurrency.
void set_jobs(unsigned jobs);
unsigned jobs();

/// Runs body(i) for i in [0, n). Iterations must write to disjoint state;
/// results never depend on the schedule. Nested calls run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace dimlab
