#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "physmimo/common.hpp"
#include "physmimo/rng.hpp"

namespace physmimo {

enum class Scenario { iid, identical_aoas, distinct_aoas };

std::string to_string(Scenario s);
Scenario scenario_from_string(const std::string& s);

struct SystemParams {
    int M = 400;                  // receive antennas
    int K = 5;                    // users per cell
    int L = 4;                    // cells
    int N = 1000;                 // block length
    std::vector<int> aoa_counts{200}; // one entry (shared) or one per cell
    double Ps = 0.1;
    double PI = 0.025;
    bool noise_enabled = false;
    double spacing_ratio = 2.0;   // d / lambda
    Scenario scenario = Scenario::identical_aoas;

    // AoA count seen from cell i (0-based).
    int aoa_count(int cell) const;
    // Throws ConfigError; returns soft warnings.
    std::vector<std::string> validate() const;

    bool operator==(const SystemParams&) const = default;
};

// ULA response, entry m: exp(-j 2 pi (d/lambda) (m-1) cos(angle)).
Vec steering_vector(double angle, int M, double spacing_ratio);

std::vector<double> draw_aoa_set(int P, Rng& rng);
std::vector<double> draw_aoa_set(int P, std::uint64_t seed);

// Columns steering_vector(phi_j) / sqrt(P).
Mat build_steering_matrix(const std::vector<double>& aoas, int M, double spacing_ratio);

struct ChannelRealization {
    std::vector<Mat> steering; // S_i, M x P_i (empty for iid)
    std::vector<Mat> fading;   // H~_i, P_i x K (empty for iid)
    Mat composite;             // M x KL, columns grouped by cell
    int K = 0;

    Mat cell(int i) const { return composite.middleCols(static_cast<Eigen::Index>(i) * K, K); }
};

ChannelRealization realize_channel(const SystemParams& p, Rng& rng);
ChannelRealization realize_channel(const SystemParams& p, std::uint64_t seed);

struct SignalBlock {
    Mat Y;
    std::vector<Mat> X;
    Mat W;
};

// Y = sqrt(Ps) H_1 X_1 + sqrt(PI) sum_{i>=2} H_i X_i + W.
SignalBlock received_block(const ChannelRealization& ch, const SystemParams& p,
                           const std::vector<Mat>& X, Rng& rng);
SignalBlock received_block(const ChannelRealization& ch, const SystemParams& p,
                           const std::vector<Mat>& X, std::uint64_t seed);

} // namespace physmimo
