// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "physmimo/channel.hpp"
#include "physmimo/cli.hpp"
#include "physmimo/rmt.hpp"
#include "physmimo/sim.hpp"
#include "physmimo/stats.hpp"

using namespace physmimo;

namespace {

struct Verdict {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

int failures = 0;

void criterion(int id, const char* name, const std::function<void(Verdict&)>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
        body(v);
    } catch (const std::exception& e) {
        v.pass = false;
        v.detail << " [exception: " << e.what() << "]";
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("criterion %d %s: %s (%.1f s)%s\n", id, name, v.pass ? "PASS" : "FAIL", dt, v.detail.str().c_str());
    std::fflush(stdout);
    failures += v.pass ? 0 : 1;
}

std::vector<cd> upper_grid(int n, double xlo, double xhi, double ylo, double yhi, std::uint64_t seed)
{
    std::vector<cd> g;
    Rng rng = make_stream(seed);
    for (int i = 0; i < n; ++i) {
        const double x = uniform(rng, xlo, xhi);
        g.emplace_back(x, std::pow(10.0, uniform(rng, std::log10(ylo), std::log10(yhi))));
    }
    return g;
}

cd mp_closed(cd s, double beta)
{
    const double a = std::pow(1 - std::sqrt(beta), 2), b = std::pow(1 + std::sqrt(beta), 2);
    return (1.0 - beta - s + std::sqrt(s - a) * std::sqrt(s - b)) / (2.0 * beta * s);
}

double mp_density(double x, double beta)
{
    const double a = std::pow(1 - std::sqrt(beta), 2), b = std::pow(1 + std::sqrt(beta), 2);
    if (x <= a || x >= b)
        return 0.0;
    return std::sqrt((b - x) * (x - a)) / (2 * std::numbers::pi * beta * x);
}

std::vector<double> nonzero_spectrum(const Mat& H, int N, double power, Rng& rng)
{
    const Mat X = cn_matrix(H.cols(), N, rng);
    const Eigen::LLT<Mat> llt(Mat(H.adjoint() * H));
    const Mat Lm = llt.matrixL();
    Eigen::SelfAdjointEigenSolver<Mat> es(Lm.adjoint() * (X * X.adjoint()) * Lm, Eigen::EigenvaluesOnly);
    std::vector<double> out;
    for (Eigen::Index k = 0; k < es.eigenvalues().size(); ++k)
        out.push_back(power * es.eigenvalues()(k) / H.rows());
    return out;
}

SystemParams fig3_params()
{
    SystemParams p;
    p.Ps = 0.1;
    p.PI = std::pow(10.0, -1.6);
    return p;
}

std::string fmt(double v)
{
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

bool separated_below(const BerPoint& a, const BerPoint& b) { return a.ci_hi < b.ci_lo; }

} // namespace

int main()
{
    const std::uint64_t seed = 1;

    criterion(1, "Fig. 3 spectrum", [&](Verdict& v) {
        const SystemParams p = fig3_params();
        const auto r = run_eigen_experiment(p, 20, seed);
        const auto sig = r.signal_bulk(), intf = r.interference_bulk();
        const double ms = median(sig), mi = median(intf);
        v.detail << " medians " << fmt(mi) << " / " << fmt(ms);
        v.require(std::abs(ms - 100.0) <= 10.0, "signal median within 10% of 100");
        v.require(std::abs(mi - 25.0) <= 2.5, "interference median within 10% of 25");
        const auto* ds = r.find_support("double");
        v.require(ds && ds->support.intervals.size() == 2, "two support intervals");
        if (!ds || ds->support.intervals.size() != 2)
            return;
        const auto& iv = ds->support.intervals;
        const double cov = support_coverage(r.pooled(), ds->support);
        v.detail << ", coverage " << fmt(cov);
        v.require(cov >= 0.99, "support holds >= 99% of samples");
        const auto [imn, imx] = std::minmax_element(intf.begin(), intf.end());
        const auto [smn, smx] = std::minmax_element(sig.begin(), sig.end());
        const double emp[4] = {*imn, *imx, *smn, *smx};
        const double ana[4] = {iv[0].first, iv[0].second, iv[1].first, iv[1].second};
        v.detail << ", edges";
        for (int k = 0; k < 4; ++k) {
            const double rel = std::abs(ana[k] - emp[k]) / emp[k];
            v.detail << " " << fmt(ana[k]) << "/" << fmt(emp[k]);
            v.require(rel < 0.10, "endpoint " + std::to_string(k) + " within 10% of the empirical edge");
        }
    });

    criterion(2, "one-sided support bracketing", [&](Verdict& v) {
        const SystemParams p = preset_config("fig1").params;
        const int l_int = p.K * (p.L - 1);
        std::vector<double> sig, intf;
        for (int t = 0; t < 50; ++t) {
            Rng rng = make_stream(seed, t, 20);
            const auto ch = realize_channel(p, rng);
            for (double x : nonzero_spectrum(ch.cell(0), p.N, p.Ps, rng))
                sig.push_back(x);
            for (double x : nonzero_spectrum(ch.composite.rightCols(l_int), p.N, p.PI, rng))
                intf.push_back(x);
        }
        auto check = [&](const char* tag, const std::vector<double>& ev, const OneSidedParams& op) {
            const auto sup = support_onesided(op).scaled(p.N);
            const double lo = sup.intervals.front().first, hi = sup.intervals.back().second;
            const auto [mn, mx] = std::minmax_element(ev.begin(), ev.end());
            v.detail << " " << tag << " [" << fmt(lo) << ", " << fmt(hi) << "] vs MC [" << fmt(*mn) << ", "
                     << fmt(*mx) << "]";
            v.require(*mn >= 0.9 * lo && *mx <= 1.1 * hi, std::string(tag) + " within 10% slack");
        };
        check("signal", sig, {p.Ps, p.K, p.M, p.N, p.aoa_count(0)});
        check("interference", intf, {p.PI, l_int, p.M, p.N, p.aoa_count(0)});
    });

    criterion(3, "rich-scattering limit of the one-sided law", [&](Verdict& v) {
        OneSidedParams op{0.1, 5, 400, 1000, 4000000};
        double worst = 0.0;
        for (cd s : upper_grid(20, 0.0, 0.3, 1e-3, 1.0, 3)) {
            const cd a = stieltjes_onesided(s, op).G;
            const cd b = stieltjes_iid_limit(s, op.a, op.alpha(), op.gamma()).G;
            worst = std::max(worst, std::abs(a - b) / std::abs(b));
        }
        v.detail << " max relative difference " << fmt(worst);
        v.require(worst < 0.01, "< 1%");
    });

    criterion(4, "block-diagonal resolvent identity", [&](Verdict& v) {
        const int K = 5;
        const std::vector<int> P{50, 100, 200};
        const int n = 350;
        Rng rng = make_stream(seed, 0, 40);
        Mat HI = Mat::Zero(n, 3 * K);
        std::vector<Mat> blocks;
        int row = 0;
        for (std::size_t i = 0; i < P.size(); ++i) {
            blocks.push_back(cn_matrix(P[i], K, rng));
            HI.block(row, i * K, P[i], K) = blocks.back();
            row += P[i];
        }
        double worst = 0.0;
        for (cd s : upper_grid(10, -1.0, 8.0, 0.1, 3.0, 4)) {
            const cd whole = empirical_stieltjes(Mat(HI * HI.adjoint()), s);
            cd parts = 0.0;
            for (std::size_t i = 0; i < P.size(); ++i)
                parts += double(P[i]) / n * empirical_stieltjes(Mat(blocks[i] * blocks[i].adjoint()), s);
            worst = std::max(worst, std::abs(whole - parts));
        }
        v.detail << " max difference " << worst;
        v.require(worst < 1e-12, "< 1e-12");
    });

    criterion(5, "MP oracle", [&](Verdict& v) {
        // single component (weight 1, K/P = 1/4) is MP with ratio 4
        double worst = 0.0;
        for (cd s : upper_grid(100, -1.0, 12.0, 1e-3, 5.0, 5))
            worst = std::max(worst, std::abs(mixture_stieltjes(s, {{1.0, 0.25}}) - mp_closed(s, 4.0)));
        std::vector<double> xs;
        for (int i = 0; i <= 200; ++i)
            xs.push_back(0.3 + 1.9 * i / 200.0);
        const auto f = density_from_stieltjes([](cd s) { return mp_stieltjes(s, 0.25); }, xs, 1e-4);
        double dev = 0.0;
        for (std::size_t i = 0; i < xs.size(); ++i)
            dev = std::max(dev, std::abs(f[i] - mp_density(xs[i], 0.25)));
        v.detail << " Stieltjes sup difference " << worst << ", density max deviation " << fmt(dev);
        v.require(worst < 1e-8, "Stieltjes < 1e-8");
        v.require(dev < 0.02, "density < 0.02");
    });

    criterion(6, "antenna saturation", [&](Verdict& v) {
        const SystemParams base = fig3_params();
        double last = 1.0;
        bool mono = true;
        double ks600 = 1.0;
        v.detail << " KS";
        for (int M : {200, 400, 600}) {
            const auto r = run_saturation_experiment(100, M, base, 500, seed);
            v.detail << " M=" << M << ":" << fmt(r.ks) << " (" << r.physical.pooled().size() << "/"
                     << r.reference.pooled().size() << " samples)";
            mono = mono && r.ks <= last;
            last = r.ks;
            if (M == 600) {
                ks600 = r.ks;
                v.require(r.physical.pooled().size() >= 10000 && r.reference.pooled().size() >= 10000,
                          ">= 1e4 samples per pool");
            }
        }
        v.require(ks600 < 0.05, "KS(600) < 0.05");
        v.require(mono, "KS nonincreasing in M");
    });

    criterion(7, "distinct-AoA widening", [&](Verdict& v) {
        SystemParams eq = fig3_params();
        eq.scenario = Scenario::distinct_aoas;
        eq.aoa_counts = {200, 200, 200, 200};
        SystemParams few = eq;
        few.aoa_counts = {200, 200, 200, 20};
        const auto a = run_eigen_experiment(eq, 20, seed);
        const auto b = run_eigen_experiment(few, 20, seed);
        auto widths = [](const EigenExperimentResult& r) {
            std::vector<double> w;
            for (const auto& ev : r.eigenvalues)
                w.push_back(ev[ev.size() - r.params.K - 1] - ev.front());
            return w;
        };
        const auto ca = batch_mean_ci(widths(a), 20), cb = batch_mean_ci(widths(b), 20);
        v.detail << " width " << fmt(cb.mean) << " [" << fmt(cb.lo) << ", " << fmt(cb.hi) << "] vs " << fmt(ca.mean)
                 << " [" << fmt(ca.lo) << ", " << fmt(ca.hi) << "]";
        v.require(cb.lo > ca.hi, "CI-separated widening");
        const auto* ds = a.find_support("distinct");
        v.require(ds != nullptr, "distinct support attached");
        if (!ds)
            return;
        const auto intf = a.interference_bulk();
        const auto [mn, mx] = std::minmax_element(intf.begin(), intf.end());
        const double lo = ds->support.intervals.front().first, hi = ds->support.intervals.back().second;
        v.detail << ", support [" << fmt(lo) << ", " << fmt(hi) << "] vs bulk [" << fmt(*mn) << ", " << fmt(*mx)
                 << "]";
        v.require(*mn >= 0.9 * lo && *mx <= 1.1 * hi, "support brackets the bulk within 10%");
    });

    criterion(8, "BER orderings", [&](Verdict& v) {
        const long long bits = 400000;
        BerSweep sw;
        sw.snr_db = -5.0;
        for (double r = -18.0; r <= 0.0; r += 3.0)
            sw.values.push_back(r);

        SystemParams phys;
        phys.M = 100;
        phys.N = 400;
        phys.aoa_counts = {50};
        phys.spacing_ratio = 0.5;
        const auto rp = run_ber_experiment(phys, sw, bits, seed, "physical");
        SystemParams iid = phys;
        iid.scenario = Scenario::iid;
        const auto ri = run_ber_experiment(iid, sw, bits, seed, "iid");

        bool a_ok = true, b_ok = true;
        for (double x : sw.values) {
            const auto& s = rp.at(Scheme::subspace, x);
            const auto& pl = rp.at(Scheme::pilot, x);
            if (x <= -9.0 && !separated_below(s, pl)) {
                a_ok = false;
                v.detail << " (a) overlap at " << x << " dB: " << fmt(s.ber) << " vs " << fmt(pl.ber) << ";";
            }
            if (ri.at(Scheme::subspace, x).ber > s.ber) {
                b_ok = false;
                v.detail << " (b) i.d. above physical at " << x << " dB;";
            }
        }
        v.detail << " (a) at -9 dB " << fmt(rp.at(Scheme::subspace, -9.0).ber) << " vs "
                 << fmt(rp.at(Scheme::pilot, -9.0).ber) << ";";
        v.require(a_ok, "(a) subspace < pilot with separated CIs at ratios <= -9 dB");
        v.require(b_ok, "(b) i.d. subspace BER <= physical pointwise");

        // (c) Fig. 8 pattern, desk scale
        SystemParams d8;
        d8.M = 200;
        d8.N = 400;
        d8.aoa_counts = {100};
        const auto fam = run_distinct_aoa_ber(d8, {10, 20, 50, 100}, sw, 200000, seed);
        bool c_sub = true, c_pil = true;
        for (double x : sw.values) {
            for (std::size_t i = 1; i < fam.size(); ++i) {
                const auto& prev = fam[i - 1].at(Scheme::subspace, x);
                const auto& cur = fam[i].at(Scheme::subspace, x);
                if (separated_below(prev, cur)) {
                    c_sub = false;
                    v.detail << " (c) subspace rises " << fam[i - 1].tag << "->" << fam[i].tag << " at " << x << " dB;";
                }
            }
            for (std::size_t i = 0; i < fam.size(); ++i)
                for (std::size_t j = i + 1; j < fam.size(); ++j)
                    if (!fam[i].at(Scheme::pilot, x).ci().overlaps(fam[j].at(Scheme::pilot, x).ci())) {
                        c_pil = false;
                        v.detail << " (c) pilot " << fam[i].tag << " vs " << fam[j].tag << " separated at " << x
                                 << " dB;";
                    }
        }
        v.require(c_sub, "(c) subspace nonincreasing in P4");
        v.require(c_pil, "(c) pilot curves CI-indistinguishable across P4");

        // (d) Fig. 9 pattern: K = 15, i.d., SNR 0 dB
        SystemParams d9;
        d9.scenario = Scenario::iid;
        d9.K = 15;
        d9.M = 200;
        d9.N = 120;
        BerSweep s9 = sw;
        s9.snr_db = 0.0;
        s9.values = {-18.0, -15.0, -12.0, -9.0};
        const auto short_fam = run_short_coherence_ber(d9, {30, 60}, s9, bits, seed);
        bool d_ok = true;
        for (const auto& r : short_fam)
            for (double x : s9.values)
                if (!separated_below(r.at(Scheme::subspace, x), r.at(Scheme::pilot, x))) {
                    d_ok = false;
                    v.detail << " (d) " << r.tag << " overlap at " << x << " dB: " << fmt(r.at(Scheme::subspace, x).ber)
                             << " vs " << fmt(r.at(Scheme::pilot, x).ber) << ";";
                }
        v.require(d_ok, "(d) subspace < pilot for N in {30, 60} at ratios <= -9 dB");
    });

    criterion(9, "property suites", [&](Verdict& v) {
        const auto grid = upper_grid(100, -0.05, 0.25, 1e-3, 1.0, 9);
        const OneSidedParams op{0.1, 5, 400, 1000, 200};
        const DoubleSidedParams dp{};
        const auto mix = mixture_from_counts(5, {50, 100, 200});
        const double al = 5.0 / 400, ga = 5.0 / 1000;
        int bad_herglotz = 0, bad_residual = 0;
        double worst_res = 0.0;
        for (cd s : grid) {
            const auto a = stieltjes_onesided(s, op);
            const auto b = stieltjes_iid_limit(s, 0.1, al, ga);
            const auto c = stieltjes_double_sided(s, dp);
            const cd sm = s * 40.0;
            const cd m = mixture_stieltjes(sm, mix);
            bad_herglotz += (a.G.imag() <= 0) + (b.G.imag() <= 0) + (c.G.imag() <= 0) + (m.imag() <= 0);
            // mixture: every component satisfies its MP quadratic and the weights sum back
            cd sum = 0.0;
            double mres = 0.0;
            for (const auto& comp : mix) {
                const cd g = mixture_stieltjes(sm, {{1.0, comp.ratio}});
                const double r = 1.0 / comp.ratio;
                mres = std::max(mres, std::abs(r * sm * g * g + (sm - 1.0 + r) * g + 1.0) /
                                          (std::abs(r * sm * g * g) + std::abs((sm - 1.0 + r) * g) + 1.0));
                sum += comp.weight * g;
            }
            mres = std::max(mres, std::abs(sum - m) / std::abs(m));
            const double res = std::max({a.residual, b.residual, c.residual, mres});
            worst_res = std::max(worst_res, res);
            bad_residual += res >= 1e-8;
        }
        const cd far(0.05, 1e6);
        const double decay = std::max({std::abs(far * stieltjes_onesided(far, op).G + 1.0),
                                       std::abs(far * stieltjes_iid_limit(far, 0.1, al, ga).G + 1.0),
                                       std::abs(far * stieltjes_double_sided(far, dp).G + 1.0),
                                       std::abs(far * mixture_stieltjes(far, mix) + 1.0)});
        v.detail << " Herglotz violations " << bad_herglotz << ", worst residual " << worst_res << ", decay "
                 << decay;
        v.require(bad_herglotz == 0, "Herglotz");
        v.require(bad_residual == 0, "fixed-point residual < 1e-8");
        v.require(decay < 1e-6, "decay sG -> -1");

        double last = -1.0;
        bool mono = true;
        v.detail << ", gaps";
        for (int P : {25, 50, 100, 200}) {
            DoubleSidedParams d;
            d.P = P;
            const double g = support_double_sided(d).support.gap() * d.N;
            v.detail << " " << fmt(g);
            mono = mono && g >= last;
            last = g;
        }
        v.require(mono, "gap nondecreasing in P");

        const double beta = 0.5, Ps = 0.1, PI = 0.025;
        const STransformFn mpS = [&](cd z, std::optional<cd>&) { return 1.0 / (1.0 + beta * z); };
        const StieltjesFn mpG = [&](cd s) { return mp_stieltjes(s, beta); };
        const STransformFn tmS = [&](cd z, std::optional<cd>& br) { return s_transform_two_mass(z, Ps, PI, 4, &br); };
        const StieltjesFn tmG = [&](cd s) { return two_mass_stieltjes(s, Ps, PI, 4); };
        const double l1 = s_stieltjes_link_check(mpS, mpG, upper_grid(100, -0.5, 3.0, 1e-2, 5.0, 10));
        const double l2 = s_stieltjes_link_check(tmS, tmG, upper_grid(100, 0.0, 0.15, 1e-3, 0.1, 11));
        v.detail << ", link MP " << l1 << ", two-mass " << l2;
        v.require(l1 < 1e-8 && l2 < 1e-8, "link residual < 1e-8");
    });

    std::printf("%d of 9 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
