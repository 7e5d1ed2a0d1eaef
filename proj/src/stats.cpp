#include "physmimo/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "physmimo/common.hpp"

namespace physmimo {

ConfidenceInterval batch_mean_ci(const std::vector<double>& b, double pooled_trials, double level)
{
    ConfidenceInterval ci;
    if (b.empty())
        throw ConfigError("confidence interval: no batches");
    const double n = static_cast<double>(b.size());
    ci.mean = std::accumulate(b.begin(), b.end(), 0.0) / n;
    if (std::all_of(b.begin(), b.end(), [](double v) { return v == 0.0; })) {
        ci.lo = 0.0;
        ci.hi = pooled_trials > 0 ? std::min(1.0, 3.0 / pooled_trials) : 1.0;
        return ci;
    }
    if (b.size() < 2) {
        ci.lo = 0.0;
        ci.hi = 1.0;
        return ci;
    }
    double ss = 0.0;
    for (double v : b)
        ss += (v - ci.mean) * (v - ci.mean);
    const double sd = std::sqrt(ss / (n - 1.0));
    boost::math::students_t dist(n - 1.0);
    const double t = boost::math::quantile(dist, 0.5 + level / 2.0);
    const double half = t * sd / std::sqrt(n);
    ci.lo = std::max(0.0, ci.mean - half);
    ci.hi = ci.mean + half;
    return ci;
}

double quantile(std::vector<double> v, double q)
{
    if (v.empty())
        throw ConfigError("quantile of an empty sample");
    std::sort(v.begin(), v.end());
    const double pos = q * static_cast<double>(v.size() - 1);
    const std::size_t i = static_cast<std::size_t>(std::floor(pos));
    if (i + 1 >= v.size())
        return v.back();
    const double f = pos - static_cast<double>(i);
    return v[i] * (1.0 - f) + v[i + 1] * f;
}

double median(std::vector<double> v) { return quantile(std::move(v), 0.5); }

double ks_statistic(std::vector<double> a, std::vector<double> b)
{
    if (a.empty() || b.empty())
        throw ConfigError("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x)
            ++i;
        while (j < b.size() && b[j] <= x)
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

Histogram make_histogram(const std::vector<double>& samples, int bins, double lo, double hi)
{
    if (bins < 1 || !(hi > lo))
        throw ConfigError("histogram: need bins >= 1 and hi > lo");
    if (samples.empty())
        throw ConfigError("histogram: no samples");
    Histogram h;
    h.edges.resize(static_cast<std::size_t>(bins) + 1);
    const double w = (hi - lo) / bins;
    for (int i = 0; i <= bins; ++i)
        h.edges[static_cast<std::size_t>(i)] = lo + w * i;
    std::vector<double> count(static_cast<std::size_t>(bins), 0.0);
    double total = 0.0;
    for (double v : samples) {
        if (v < lo || v > hi)
            continue;
        int k = static_cast<int>((v - lo) / w);
        k = std::clamp(k, 0, bins - 1);
        count[static_cast<std::size_t>(k)] += 1.0;
        total += 1.0;
    }
    h.density.resize(count.size());
    for (std::size_t k = 0; k < count.size(); ++k)
        h.density[k] = total > 0 ? count[k] / (total * w) : 0.0;
    return h;
}

} // namespace physmimo
