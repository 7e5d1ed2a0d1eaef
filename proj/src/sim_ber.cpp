#include "physmimo/sim.hpp"

#include <algorithm>
#include <array>
#include <sstream>

#include "physmimo/estimation.hpp"

namespace physmimo {

std::string to_string(Scheme s) { return s == Scheme::subspace ? "subspace" : "pilot"; }

std::string to_string(SweepVariable v) { return v == SweepVariable::ratio_db ? "ratio_db" : "snr_db"; }

const BerPoint& BerResult::at(Scheme s, double x) const
{
    for (const auto& pt : points)
        if (pt.scheme == s && std::abs(pt.x - x) < 1e-9)
            return pt;
    std::ostringstream os;
    os << "BER result " << tag << ": no " << to_string(s) << " point at " << x;
    throw ConfigError(os.str());
}

std::vector<BerPoint> BerResult::curve(Scheme s) const
{
    std::vector<BerPoint> c;
    for (const auto& pt : points)
        if (pt.scheme == s)
            c.push_back(pt);
    return c;
}

namespace {

double error_rate(const Mat& decisions, const std::vector<std::uint8_t>& bits)
{
    const std::vector<std::uint8_t> got = bits_of(decisions);
    std::size_t e = 0;
    for (std::size_t i = 0; i < bits.size(); ++i)
        e += got[i] != bits[i];
    return static_cast<double>(e);
}

} // namespace

BerResult run_ber_experiment(const SystemParams& p0, const BerSweep& sweep, long long bits_target,
                             std::uint64_t seed, const std::string& tag)
{
    if (sweep.values.empty())
        throw ConfigError("sweep.values: at least one point required");
    if (bits_target < 10000)
        throw ConfigError("bits: target must be >= 1e4");
    SystemParams p = p0;
    p.noise_enabled = true;
    p.validate();
    if (p.N <= p.K)
        throw ConfigError("N, K: N must exceed K to leave data symbols");

    const long long per_block = 2LL * p.K * (p.N - p.K);
    const int blocks = static_cast<int>(std::max<long long>(10, (bits_target + per_block - 1) / per_block));
    const std::size_t npts = sweep.values.size();
    // errors[block][point][scheme]
    std::vector<std::vector<std::array<double, 2>>> errs(static_cast<std::size_t>(blocks),
                                                         std::vector<std::array<double, 2>>(npts));
    const Mat Xp = dft_pilots(p.K);

    parallel_for(static_cast<std::size_t>(blocks), [&](std::size_t b) {
        Rng rng = make_stream(seed, b, 0);
        const ChannelRealization ch = realize_channel(p, rng);
        std::vector<PilotLayout> cells;
        for (int i = 0; i < p.L; ++i)
            cells.push_back(make_pilot_layout(p.K, p.N, rng));
        const Mat W = cn_matrix(p.M, p.N, rng);
        std::vector<Mat> HX;
        for (int i = 0; i < p.L; ++i)
            HX.push_back(ch.cell(i) * cells[static_cast<std::size_t>(i)].block());
        for (std::size_t k = 0; k < npts; ++k) {
            const double snr = sweep.variable == SweepVariable::snr_db ? sweep.values[k] : sweep.snr_db;
            const double ratio = sweep.variable == SweepVariable::ratio_db ? sweep.values[k] : sweep.ratio_db;
            const double Ps = db_to_linear(snr), PI = Ps * db_to_linear(ratio);
            Mat Y = W;
            Y += std::sqrt(Ps) * HX[0];
            for (int i = 1; i < p.L; ++i)
                Y += std::sqrt(PI) * HX[static_cast<std::size_t>(i)];
            const auto& bits = cells[0].bits;

            const SubspaceModel sm = signal_subspace(Y, p.K);
            const Mat Yt = sm.basis.adjoint() * Y;
            const Mat G = subspace_zf_resolve(Yt.leftCols(p.K), Xp);
            errs[b][k][0] = error_rate(mf_detect(Yt.rightCols(p.N - p.K), G), bits);

            const Mat H = pilot_based_estimate(Y, Xp);
            errs[b][k][1] = error_rate(mf_detect(Y.rightCols(p.N - p.K), H), bits);
        }
    });

    BerResult r;
    r.tag = tag;
    r.variable = sweep.variable;
    r.params = p;
    r.seed = seed;
    for (std::size_t k = 0; k < npts; ++k) {
        for (int s = 0; s < 2; ++s) {
            std::vector<double> rates;
            double total = 0.0;
            for (int b = 0; b < blocks; ++b) {
                const double e = errs[static_cast<std::size_t>(b)][k][static_cast<std::size_t>(s)];
                rates.push_back(e / static_cast<double>(per_block));
                total += e;
            }
            const double nbits = static_cast<double>(per_block) * blocks;
            const ConfidenceInterval ci = batch_mean_ci(rates, nbits);
            BerPoint pt;
            pt.x = sweep.values[k];
            pt.scheme = s == 0 ? Scheme::subspace : Scheme::pilot;
            pt.ber = total / nbits;
            pt.ci_lo = ci.lo;
            pt.ci_hi = ci.hi;
            pt.bits = static_cast<long long>(nbits);
            pt.errors = static_cast<long long>(total);
            pt.blocks = blocks;
            r.points.push_back(pt);
        }
    }
    return r;
}

std::vector<BerResult> run_distinct_aoa_ber(const SystemParams& p, const std::vector<int>& p4_values,
                                            const BerSweep& sweep, long long bits_target, std::uint64_t seed)
{
    if (p.L < 2)
        throw ConfigError("L: distinct-AoA sweep needs at least two cells");
    std::vector<BerResult> out;
    for (int P4 : p4_values) {
        SystemParams q = p;
        q.scenario = Scenario::distinct_aoas;
        const int P1 = p.aoa_count(0);
        q.aoa_counts.assign(static_cast<std::size_t>(p.L), P1);
        q.aoa_counts.back() = P4;
        out.push_back(run_ber_experiment(q, sweep, bits_target, seed, "P4=" + std::to_string(P4)));
    }
    return out;
}

std::vector<BerResult> run_short_coherence_ber(const SystemParams& p, const std::vector<int>& n_values,
                                               const BerSweep& sweep, long long bits_target, std::uint64_t seed)
{
    std::vector<BerResult> out;
    for (int N : n_values) {
        if (N < p.K)
            throw ConfigError("N, K: N=" + std::to_string(N) + " must be >= K=" + std::to_string(p.K));
        SystemParams q = p;
        q.N = N;
        q.scenario = Scenario::iid;
        out.push_back(run_ber_experiment(q, sweep, bits_target, seed, "N=" + std::to_string(N)));
    }
    return out;
}

} // namespace physmimo
