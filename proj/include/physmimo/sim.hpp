#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "physmimo/channel.hpp"
#include "physmimo/rmt.hpp"
#include "physmimo/stats.hpp"

namespace physmimo {

// First K entries Ps, remaining K(L-1) entries PI.
std::vector<double> worst_case_power_diagonal(int K, int L, double Ps, double PI);

// ---- eigenvalue experiments ----

// Nonzero eigenvalues (> 1e-8 max) of Y Y^H / M for one block, ascending.
std::vector<double> block_eigenvalues(const ChannelRealization& ch, const SystemParams& p, Rng& rng);

struct LabelledSupport {
    std::string label;
    SpectralSupport support; // already multiplied by N
};

struct EigenOptions {
    int bins = 100;
    bool attach_supports = true;
    SupportGrid grid;
};

struct EigenExperimentResult {
    SystemParams params;
    int trials = 0;
    std::uint64_t seed = 0;
    std::vector<std::vector<double>> eigenvalues; // per trial, ascending
    Histogram histogram;
    std::vector<LabelledSupport> supports;
    std::vector<std::string> warnings;

    std::vector<double> pooled() const;
    // Per trial: the K largest eigenvalues, and the rest.
    std::vector<double> signal_bulk() const;
    std::vector<double> interference_bulk() const;
    const LabelledSupport* find_support(const std::string& label) const;
};

EigenExperimentResult run_eigen_experiment(const SystemParams& p, int trials, std::uint64_t seed,
                                           const EigenOptions& opt = {});

// Fraction of samples inside the support intervals, each widened by dilation * width.
double support_coverage(const std::vector<double>& samples, const SpectralSupport& s, double dilation = 0.0);

struct SaturationResult {
    EigenExperimentResult physical;  // M = M_physical, P AoAs
    EigenExperimentResult reference; // i.d. channel, M = P
    double ks = 0.0;
};

SaturationResult run_saturation_experiment(int P, int M_physical, const SystemParams& base, int trials,
                                           std::uint64_t seed);

// ---- BER experiments ----

enum class Scheme { subspace, pilot };
std::string to_string(Scheme s);

enum class SweepVariable { ratio_db, snr_db };
std::string to_string(SweepVariable v);

struct BerSweep {
    SweepVariable variable = SweepVariable::ratio_db;
    std::vector<double> values;
    double snr_db = -5.0;   // fixed when sweeping the ratio
    double ratio_db = -9.0; // fixed when sweeping the SNR

    bool operator==(const BerSweep&) const = default;
};

struct BerPoint {
    double x = 0.0;
    Scheme scheme = Scheme::subspace;
    double ber = 0.0;
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    long long bits = 0;
    long long errors = 0;
    int blocks = 0;

    ConfidenceInterval ci() const { return {ber, ci_lo, ci_hi}; }
};

struct BerResult {
    std::string tag;
    SweepVariable variable = SweepVariable::ratio_db;
    SystemParams params;
    std::uint64_t seed = 0;
    std::vector<BerPoint> points;

    const BerPoint& at(Scheme s, double x) const;
    std::vector<BerPoint> curve(Scheme s) const;
};

// Per block: one channel, K x K DFT pilots shared by all cells, QPSK data,
// unit-variance noise. Ps = 10^(SNR/10), PI = Ps 10^(ratio/10). The same
// blocks are reused at every sweep point.
BerResult run_ber_experiment(const SystemParams& p, const BerSweep& sweep, long long bits_target,
                             std::uint64_t seed, const std::string& tag = "");

// aoa_counts {P1, ..., P1, P4} per P4 value.
std::vector<BerResult> run_distinct_aoa_ber(const SystemParams& p, const std::vector<int>& p4_values,
                                            const BerSweep& sweep, long long bits_target, std::uint64_t seed);

// i.d. channel, one result per block length N.
std::vector<BerResult> run_short_coherence_ber(const SystemParams& p, const std::vector<int>& n_values,
                                               const BerSweep& sweep, long long bits_target, std::uint64_t seed);

} // namespace physmimo
