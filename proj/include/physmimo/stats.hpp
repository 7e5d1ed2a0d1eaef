#pragma once

#include <cstdint>
#include <vector>

namespace physmimo {

struct ConfidenceInterval {
    double mean = 0.0;
    double lo = 0.0;
    double hi = 0.0;
    bool overlaps(const ConfidenceInterval& o) const { return lo <= o.hi && o.lo <= hi; }
};

// Two-sided 95% t interval over batch means (one value per coherence block).
// All-zero batches fall back to the rule of three on the pooled trial count.
ConfidenceInterval batch_mean_ci(const std::vector<double>& batch_means, double pooled_trials, double level = 0.95);

double quantile(std::vector<double> v, double q);
double median(std::vector<double> v);

// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct Histogram {
    std::vector<double> edges;   // bins + 1
    std::vector<double> density; // integrates to 1 over the edges
    double bin_width() const { return edges.size() > 1 ? edges[1] - edges[0] : 0.0; }
};

Histogram make_histogram(const std::vector<double>& samples, int bins, double lo, double hi);

} // namespace physmimo
