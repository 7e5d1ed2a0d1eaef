#pragma once

#include <cstdint>
#include <random>

#include "physmimo/common.hpp"

namespace physmimo {

using Rng = std::mt19937_64;

// Independent stream for (seed, trial, stream). Parallel trials draw from
// their own stream so results do not depend on scheduling.
Rng make_stream(std::uint64_t seed, std::uint64_t trial = 0, std::uint64_t stream = 0);

// CN(0,1): variance 1/2 per real component.
cd cn_sample(Rng& rng);
Mat cn_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng);
double uniform(Rng& rng, double lo, double hi);

// Number of worker threads, from PHYSMIMO_THREADS (default: hardware concurrency).
unsigned worker_threads();

// Runs body(i) for i in [0, n). Each index must write only its own slot.
template <class F>
void parallel_for(std::size_t n, F&& body);

} // namespace physmimo

#include "physmimo/detail/parallel.hpp"
