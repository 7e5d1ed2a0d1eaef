#include "physmimo/rng.hpp"

#include <cstdlib>
#include <string>
#include <thread>

namespace physmimo {

Rng make_stream(std::uint64_t seed, std::uint64_t trial, std::uint64_t stream)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      0x9e3779b9u};
    return Rng(seq);
}

cd cn_sample(Rng& rng)
{
    static thread_local std::normal_distribution<double> nd(0.0, 1.0);
    constexpr double s = 0.70710678118654752440;
    nd.reset();
    double re = nd(rng);
    double im = nd(rng);
    return {s * re, s * im};
}

Mat cn_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng)
{
    Mat m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = cn_sample(rng);
    return m;
}

double uniform(Rng& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(lo, hi);
    return u(rng);
}

unsigned worker_threads()
{
    if (const char* env = std::getenv("PHYSMIMO_THREADS")) {
        try {
            int v = std::stoi(env);
            if (v >= 1)
                return static_cast<unsigned>(v);
        } catch (...) {
        }
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

} // namespace physmimo
