// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace c3b {

/// Generator for one independent stream, fully determined by the run seed
/// and the stream coordinates (e.g. sector, contour index). Results never
/// depend on which worker draws from the stream.
std::mt19937_64 stream_engine(std::uint64_t seed, std::initializer_list<std::uint64_t> stream);

}  // namespace c3b
