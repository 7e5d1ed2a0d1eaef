#include "physmimo/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace physmimo {

std::string to_string(Scenario s)
{
    switch (s) {
    case Scenario::iid:
        return "iid";
    case Scenario::identical_aoas:
        return "identical_aoas";
    case Scenario::distinct_aoas:
        return "distinct_aoas";
    }
    return "?";
}

Scenario scenario_from_string(const std::string& s)
{
    if (s == "iid")
        return Scenario::iid;
    if (s == "identical_aoas" || s == "identical")
        return Scenario::identical_aoas;
    if (s == "distinct_aoas" || s == "distinct")
        return Scenario::distinct_aoas;
    throw ConfigError("scenario: unknown value '" + s + "'");
}

int SystemParams::aoa_count(int cell) const
{
    if (aoa_counts.empty())
        throw ConfigError("aoa_counts: empty");
    if (aoa_counts.size() == 1)
        return aoa_counts[0];
    return aoa_counts.at(static_cast<std::size_t>(cell));
}

std::vector<std::string> SystemParams::validate() const
{
    std::vector<std::string> warn;
    if (M < 1 || K < 1 || L < 1 || N < 1)
        throw ConfigError("M, K, L, N: all dimensions must be >= 1");
    if (K > N)
        throw ConfigError("K, N: K must not exceed N");
    if (!(Ps > 0))
        throw ConfigError("Ps: must be > 0");
    if (!(PI >= 0))
        throw ConfigError("PI: must be >= 0");
    if (!(spacing_ratio > 0))
        throw ConfigError("spacing_ratio: must be > 0");
    if (scenario == Scenario::iid)
        return warn;
    if (aoa_counts.empty())
        throw ConfigError("aoa_counts: required for AoA scenarios");
    if (scenario == Scenario::distinct_aoas && aoa_counts.size() != 1 &&
        aoa_counts.size() != static_cast<std::size_t>(L))
        throw ConfigError("aoa_counts, L: need one count or one per cell");
    if (scenario == Scenario::identical_aoas && aoa_counts.size() != 1 &&
        std::adjacent_find(aoa_counts.begin(), aoa_counts.end(), std::not_equal_to<>()) != aoa_counts.end())
        throw ConfigError("aoa_counts: identical AoAs need a single shared count");
    for (int P : aoa_counts) {
        if (P < 1)
            throw ConfigError("aoa_counts: entries must be >= 1");
        if (K > P) {
            std::ostringstream os;
            os << "K, aoa_counts: K=" << K << " exceeds P=" << P;
            throw ConfigError(os.str());
        }
        if (static_cast<double>(K) / P > 0.2) {
            std::ostringstream os;
            os << "K/P = " << static_cast<double>(K) / P << " > 0.2, outside the K << P regime";
            warn.push_back(os.str());
        }
    }
    return warn;
}

Vec steering_vector(double angle, int M, double spacing_ratio)
{
    if (!(angle >= 0.0 && angle <= std::numbers::pi))
        throw DomainError("steering_vector: angle outside [0, pi]");
    if (M < 1)
        throw DomainError("steering_vector: M must be >= 1");
    Vec v(M);
    const double k = -2.0 * std::numbers::pi * spacing_ratio * std::cos(angle);
    for (int m = 0; m < M; ++m)
        v(m) = std::polar(1.0, k * m);
    return v;
}

std::vector<double> draw_aoa_set(int P, Rng& rng)
{
    if (P < 1)
        throw ConfigError("draw_aoa_set: P must be >= 1");
    std::uniform_real_distribution<double> u(0.0, std::numbers::pi);
    std::vector<double> a(static_cast<std::size_t>(P));
    for (auto& x : a)
        x = u(rng);
    return a;
}

std::vector<double> draw_aoa_set(int P, std::uint64_t seed)
{
    Rng rng = make_stream(seed);
    return draw_aoa_set(P, rng);
}

Mat build_steering_matrix(const std::vector<double>& aoas, int M, double spacing_ratio)
{
    if (aoas.empty())
        throw ConfigError("build_steering_matrix: empty AoA set");
    const auto P = static_cast<Eigen::Index>(aoas.size());
    Mat S(M, P);
    const double scale = 1.0 / std::sqrt(static_cast<double>(P));
    for (Eigen::Index j = 0; j < P; ++j)
        S.col(j) = steering_vector(aoas[static_cast<std::size_t>(j)], M, spacing_ratio) * scale;
    return S;
}

ChannelRealization realize_channel(const SystemParams& p, Rng& rng)
{
    p.validate();
    ChannelRealization ch;
    ch.K = p.K;
    ch.composite.resize(p.M, static_cast<Eigen::Index>(p.K) * p.L);
    if (p.scenario == Scenario::iid) {
        ch.composite = cn_matrix(p.M, static_cast<Eigen::Index>(p.K) * p.L, rng);
        return ch;
    }
    if (p.scenario == Scenario::identical_aoas) {
        Mat S = build_steering_matrix(draw_aoa_set(p.aoa_count(0), rng), p.M, p.spacing_ratio);
        for (int i = 0; i < p.L; ++i)
            ch.steering.push_back(S);
    } else {
        for (int i = 0; i < p.L; ++i)
            ch.steering.push_back(build_steering_matrix(draw_aoa_set(p.aoa_count(i), rng), p.M, p.spacing_ratio));
    }
    for (int i = 0; i < p.L; ++i) {
        Mat Ht = cn_matrix(ch.steering[static_cast<std::size_t>(i)].cols(), p.K, rng);
        ch.composite.middleCols(static_cast<Eigen::Index>(i) * p.K, p.K) = ch.steering[static_cast<std::size_t>(i)] * Ht;
        ch.fading.push_back(std::move(Ht));
    }
    return ch;
}

ChannelRealization realize_channel(const SystemParams& p, std::uint64_t seed)
{
    Rng rng = make_stream(seed);
    return realize_channel(p, rng);
}

SignalBlock received_block(const ChannelRealization& ch, const SystemParams& p,
                           const std::vector<Mat>& X, Rng& rng)
{
    if (X.size() != static_cast<std::size_t>(p.L))
        throw ShapeError("received_block: need one X per cell");
    const Eigen::Index N = X[0].cols();
    if (ch.composite.rows() != p.M || ch.composite.cols() != static_cast<Eigen::Index>(p.K) * p.L)
        throw ShapeError("received_block: channel does not match params");
    SignalBlock b;
    b.Y = Mat::Zero(p.M, N);
    for (int i = 0; i < p.L; ++i) {
        const Mat& Xi = X[static_cast<std::size_t>(i)];
        if (Xi.rows() != p.K || Xi.cols() != N)
            throw ShapeError("received_block: X_i must be K x N");
        const double amp = std::sqrt(i == 0 ? p.Ps : p.PI);
        if (amp != 0.0)
            b.Y.noalias() += amp * (ch.cell(i) * Xi);
    }
    if (p.noise_enabled) {
        b.W = cn_matrix(p.M, N, rng);
        b.Y += b.W;
    } else {
        b.W = Mat::Zero(p.M, N);
    }
    b.X = X;
    return b;
}

SignalBlock received_block(const ChannelRealization& ch, const SystemParams& p,
                           const std::vector<Mat>& X, std::uint64_t seed)
{
    Rng rng = make_stream(seed, 0, 1);
    return received_block(ch, p, X, rng);
}

} // namespace physmimo
