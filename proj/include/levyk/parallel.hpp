#pragma once

#include <cstddef>
#include <functional>

namespace levyk {

/// Worker count used by the data-parallel loops of the kernel and bound-state
/// modules. Defaults to 1; values below 1 are clamped.
void set_num_threads(int n);
int num_threads();

/// Calls fn(i) for i in [0, n), interleaved across workers.
/// The first exception thrown by any worker is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace levyk
