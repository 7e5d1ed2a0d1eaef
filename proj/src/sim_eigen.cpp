#include "physmimo/sim.hpp"

#include <algorithm>
#include <sstream>

namespace physmimo {

std::vector<double> worst_case_power_diagonal(int K, int L, double Ps, double PI)
{
    if (K < 1 || L < 1 || !(Ps > 0) || !(PI > 0))
        throw ConfigError("worst_case_power_diagonal: need K, L >= 1 and positive powers");
    std::vector<double> d(static_cast<std::size_t>(K) * L, PI);
    std::fill(d.begin(), d.begin() + K, Ps);
    return d;
}

std::vector<double> block_eigenvalues(const ChannelRealization& ch, const SystemParams& p, Rng& rng)
{
    const Eigen::Index M = p.M, N = p.N, KL = static_cast<Eigen::Index>(p.K) * p.L;
    std::vector<Mat> X;
    for (int i = 0; i < p.L; ++i)
        X.push_back(cn_matrix(p.K, N, rng));
    RVec ev;
    if (!p.noise_enabled) {
        // Y = C X; the nonzero spectrum of Y Y^H equals that of R X X^H R^H.
        Mat C(M, KL);
        for (int i = 0; i < p.L; ++i)
            C.middleCols(static_cast<Eigen::Index>(i) * p.K, p.K) = std::sqrt(i == 0 ? p.Ps : p.PI) * ch.cell(i);
        Mat Xs(KL, N);
        for (int i = 0; i < p.L; ++i)
            Xs.middleRows(static_cast<Eigen::Index>(i) * p.K, p.K) = X[static_cast<std::size_t>(i)];
        Eigen::HouseholderQR<Mat> qr(C);
        const Eigen::Index r = std::min(M, KL);
        const Mat R = qr.matrixQR().topRows(r).triangularView<Eigen::Upper>();
        const Mat B = R * Xs;
        Eigen::SelfAdjointEigenSolver<Mat> es(B * B.adjoint(), Eigen::EigenvaluesOnly);
        ev = es.eigenvalues();
    } else {
        const SignalBlock blk = received_block(ch, p, X, rng);
        const Mat G = M <= N ? Mat(blk.Y * blk.Y.adjoint()) : Mat(blk.Y.adjoint() * blk.Y);
        Eigen::SelfAdjointEigenSolver<Mat> es(G, Eigen::EigenvaluesOnly);
        ev = es.eigenvalues();
    }
    ev /= static_cast<double>(M);
    const double mx = ev.size() ? ev.maxCoeff() : 0.0;
    std::vector<double> out;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        if (ev(i) > 1e-8 * mx)
            out.push_back(ev(i));
    return out;
}

std::vector<double> EigenExperimentResult::pooled() const
{
    std::vector<double> v;
    for (const auto& t : eigenvalues)
        v.insert(v.end(), t.begin(), t.end());
    return v;
}

std::vector<double> EigenExperimentResult::signal_bulk() const
{
    std::vector<double> v;
    const std::size_t K = static_cast<std::size_t>(params.K);
    for (const auto& t : eigenvalues)
        v.insert(v.end(), t.end() - static_cast<std::ptrdiff_t>(std::min(K, t.size())), t.end());
    return v;
}

std::vector<double> EigenExperimentResult::interference_bulk() const
{
    std::vector<double> v;
    const std::size_t K = static_cast<std::size_t>(params.K);
    for (const auto& t : eigenvalues)
        if (t.size() > K)
            v.insert(v.end(), t.begin(), t.end() - static_cast<std::ptrdiff_t>(K));
    return v;
}

const LabelledSupport* EigenExperimentResult::find_support(const std::string& label) const
{
    for (const auto& s : supports)
        if (s.label == label)
            return &s;
    return nullptr;
}

namespace {

void attach_supports(EigenExperimentResult& r, const EigenOptions& opt)
{
    const SystemParams& p = r.params;
    const double Nd = p.N;
    auto add = [&](const std::string& label, auto&& compute) {
        try {
            SpectralSupport s = compute();
            for (const auto& w : s.warnings)
                r.warnings.push_back(label + ": " + w);
            r.supports.push_back({label, s.scaled(Nd)});
        } catch (const std::exception& e) {
            r.warnings.push_back(label + ": " + e.what());
        }
    };
    if (p.noise_enabled)
        r.warnings.emplace_back("analytic supports describe the noiseless model");
    if (p.scenario == Scenario::iid) {
        r.warnings.emplace_back("no support overlay for the i.d. channel");
        return;
    }
    const int P1 = p.aoa_count(0);
    add("onesided_signal", [&] { return support_onesided({p.Ps, p.K, p.M, p.N, P1}, opt.grid); });
    if (p.L < 2)
        return;
    if (p.scenario == Scenario::identical_aoas) {
        add("onesided_interference",
            [&] { return support_onesided({p.PI, p.K * (p.L - 1), p.M, p.N, P1}, opt.grid); });
        add("double", [&] {
            DoubleSidedParams d{p.K, p.L, p.M, p.N, P1, p.Ps, p.PI};
            return support_double_sided(d, opt.grid).support;
        });
        return;
    }
    bool equal = true;
    for (int i = 2; i < p.L; ++i)
        equal = equal && p.aoa_count(i) == p.aoa_count(1);
    if (!equal) {
        r.warnings.emplace_back("no closed-form interference support for unequal AoA counts");
        return;
    }
    add("distinct", [&] { return support_distinct(p.K, p.L, p.M, p.N, p.aoa_count(1), p.PI, opt.grid); });
}

EigenExperimentResult eigen_impl(const SystemParams& p, int trials, std::uint64_t seed, const EigenOptions& opt,
                                 std::uint64_t stream)
{
    if (trials < 1)
        throw ConfigError("trials: must be >= 1");
    EigenExperimentResult r;
    r.params = p;
    r.trials = trials;
    r.seed = seed;
    r.warnings = p.validate();
    r.eigenvalues.resize(static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
        Rng rng = make_stream(seed, t, stream);
        const ChannelRealization ch = realize_channel(p, rng);
        r.eigenvalues[t] = block_eigenvalues(ch, p, rng);
    });
    const std::vector<double> all = r.pooled();
    if (all.empty())
        throw NumericalError("eigen experiment: no nonzero eigenvalues");
    const double hi = *std::max_element(all.begin(), all.end());
    r.histogram = make_histogram(all, opt.bins, 0.0, 1.05 * hi);
    if (opt.attach_supports)
        attach_supports(r, opt);
    return r;
}

} // namespace

EigenExperimentResult run_eigen_experiment(const SystemParams& p, int trials, std::uint64_t seed,
                                           const EigenOptions& opt)
{
    return eigen_impl(p, trials, seed, opt, 0);
}

double support_coverage(const std::vector<double>& samples, const SpectralSupport& s, double dilation)
{
    if (samples.empty())
        return 0.0;
    std::size_t in = 0;
    for (double v : samples)
        in += s.contains(v, dilation);
    return static_cast<double>(in) / static_cast<double>(samples.size());
}

SaturationResult run_saturation_experiment(int P, int M_physical, const SystemParams& base, int trials,
                                           std::uint64_t seed)
{
    if (M_physical < P) {
        std::ostringstream os;
        os << "M_physical, P: M_physical=" << M_physical << " must be >= P=" << P;
        throw ConfigError(os.str());
    }
    SystemParams ph = base;
    ph.M = M_physical;
    ph.aoa_counts = {P};
    ph.scenario = Scenario::identical_aoas;
    SystemParams id = base;
    id.M = P;
    id.scenario = Scenario::iid;
    EigenOptions opt;
    opt.attach_supports = false;
    SaturationResult r;
    r.physical = eigen_impl(ph, trials, seed, opt, 1);
    r.reference = eigen_impl(id, trials, seed, opt, 2);
    r.ks = ks_statistic(r.physical.pooled(), r.reference.pooled());
    return r;
}

} // namespace physmimo
