// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace c3b {

/// Environment variable that overrides the worker count.
inline constexpr const char* workers_env = "C3B_WORKERS";

/// Worker count: `requested` if positive, else $C3B_WORKERS, else the
/// hardware concurrency.
std::size_t resolve_workers(int requested = 0);

/// Runs body(i) for i in [0, count) on up to `workers` threads. Each index is
/// processed exactly once; callers write results into slot i so the outcome
/// does not depend on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace c3b
