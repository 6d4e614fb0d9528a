#pragma once

#include <cstddef>
#include <functional>

namespace coordsim {

/// Number of workers to use for a requested count; 0 means all available
/// execution units.
std::size_t resolve_threads(std::size_t requested);

/// Runs body(0..count-1) on up to `threads` workers. Each index must write only
/// to its own output slot. If several indices throw, the exception from the
/// lowest index is rethrown after all workers finish.
void parallel_for(std::size_t count, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace coordsim
