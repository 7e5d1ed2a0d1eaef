#include "physmimo/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "physmimo/rng.hpp"

namespace physmimo {

namespace {

constexpr double kAnchor = 1e6;

double rel_residual(const Poly& c, cd G)
{
    double scale = 0.0;
    cd pw = 1.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) {
        scale += std::abs(*it * pw);
        pw *= G;
    }
    return scale > 0 ? std::abs(poly_eval(c, G)) / scale : 0.0;
}

std::string roots_text(const std::vector<cd>& r)
{
    std::ostringstream os;
    os.precision(10);
    for (const auto& v : r)
        os << " (" << v.real() << ", " << v.imag() << ")";
    return os.str();
}

// Nearest-root continuation from the anchor |s| = 1e6 down a vertical path.
StieltjesEval track_polynomial_law(cd s, const std::function<Poly(cd)>& poly, const char* law,
                                   int steps_per_decade = 10)
{
    if (s.imag() == 0.0 || !std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw DomainError(std::string(law) + ": argument must have nonzero imaginary part");
    const bool flip = s.imag() < 0;
    if (flip)
        s = std::conj(s);

    const double x = s.real();
    double lt = std::log10(std::max(kAnchor, s.imag()));
    const double l_end = std::log10(s.imag());
    cd sa(x, std::pow(10.0, lt));

    auto roots = poly_roots(poly(sa));
    if (roots.empty())
        throw NumericalError(std::string(law) + ": degenerate polynomial at anchor");
    cd G = -1.0 / sa;
    {
        std::size_t best = 0;
        for (std::size_t k = 1; k < roots.size(); ++k)
            if (std::abs(roots[k] - G) < std::abs(roots[best] - G))
                best = k;
        G = roots[best];
    }
    int steps = 0;
    double h = 1.0 / steps_per_decade;
    while (lt > l_end) {
        double ln = std::max(l_end, lt - h);
        cd sn(x, std::pow(10.0, ln));
        roots = poly_roots(poly(sn));
        if (roots.empty())
            throw NumericalError(std::string(law) + ": no roots along continuation path");
        double d1 = 1e300, d2 = 1e300;
        std::size_t best = 0;
        for (std::size_t k = 0; k < roots.size(); ++k) {
            double d = std::abs(roots[k] - G);
            if (d < d1) {
                d2 = d1;
                d1 = d;
                best = k;
            } else if (d < d2) {
                d2 = d;
            }
        }
        if (d1 > 0.3 * d2 && h > 1e-7) {
            h *= 0.5;
            continue;
        }
        G = roots[best];
        lt = ln;
        ++steps;
        if (h < 1.0 / steps_per_decade)
            h = std::min(1.0 / steps_per_decade, h * 2.0);
    }
    const Poly c = poly(s);
    if (!(G.imag() > -1e-10 * std::max(1.0, std::abs(G)))) {
        std::ostringstream os;
        os << law << ": no admissible root at s = (" << s.real() << ", " << s.imag() << "); roots:"
           << roots_text(poly_roots(c));
        throw NumericalError(os.str());
    }
    StieltjesEval ev;
    ev.s = flip ? std::conj(s) : s;
    ev.G = flip ? std::conj(G) : G;
    ev.law = law;
    ev.path_steps = steps;
    ev.residual = rel_residual(c, G);
    return ev;
}

} // namespace

void OneSidedParams::validate() const
{
    if (!(a > 0))
        throw ConfigError("a_k must be > 0");
    if (l < 1 || m < 1 || n < 1 || p < 1)
        throw ConfigError("l, m, n, p must be >= 1");
}

std::vector<std::string> DoubleSidedParams::validate() const
{
    if (K < 1 || L < 1 || M < 1 || N < 1 || P < 1)
        throw ConfigError("K, L, M, N, P must be >= 1");
    if (!(Ps > 0) || !(PI > 0))
        throw ConfigError("Ps, PI must be > 0");
    std::vector<std::string> w;
    if (Ps < PI)
        w.emplace_back("Ps < PI: outside the intended separation regime");
    return w;
}

cd mp_stieltjes(cd s, double beta)
{
    if (s.imag() == 0.0)
        throw DomainError("mp_stieltjes: s must not be real");
    if (!(beta > 0))
        throw DomainError("mp_stieltjes: ratio must be > 0");
    const cd a = beta * s;
    const cd b = s - 1.0 + beta;
    const cd c = 1.0;
    cd sq = std::sqrt(b * b - 4.0 * a * c);
    if ((std::conj(b) * sq).real() < 0)
        sq = -sq;
    const cd q = -0.5 * (b + sq);
    const cd r1 = q / a;
    const cd r2 = c / q;
    const double sg = s.imag() > 0 ? 1.0 : -1.0;
    return (r1.imag() * sg >= r2.imag() * sg) ? r1 : r2;
}

Poly onesided_polynomial(cd s, const OneSidedParams& p)
{
    const double a1 = p.alpha(), a2 = p.beta(), a3 = p.gamma();
    Poly f = poly_mul(Poly{s, 1.0 - a3}, Poly{a1 * s, a1 - a3});
    f = poly_mul(f, Poly{a1 * s, a1 - a2 * a3});
    f = poly_mul(f, Poly{p.a, 0.0});
    return poly_add(f, Poly{a2 * a3 * a3 * s, a2 * a3 * a3});
}

StieltjesEval stieltjes_onesided(cd s, const OneSidedParams& p)
{
    p.validate();
    return track_polynomial_law(s, [&](cd z) { return onesided_polynomial(z, p); }, "onesided");
}

Poly iid_limit_polynomial(cd s, double Ps, double alpha, double gamma)
{
    Poly f = poly_mul(Poly{s, 1.0 - gamma}, Poly{alpha * s, alpha - gamma});
    f = poly_mul(f, Poly{-Ps, 0.0});
    return poly_add(f, Poly{gamma * s, gamma});
}

StieltjesEval stieltjes_iid_limit(cd s, double Ps, double alpha, double gamma)
{
    if (!(Ps > 0) || !(alpha > 0) || !(gamma > 0))
        throw ConfigError("iid limit: Ps, alpha, gamma must be > 0");
    return track_polynomial_law(s, [&](cd z) { return iid_limit_polynomial(z, Ps, alpha, gamma); }, "iid_limit");
}

cd s_transform_two_mass(cd z, double Ps, double PI, int L, std::optional<cd>* branch)
{
    if (L < 1)
        throw ConfigError("two-mass S-transform: L must be >= 1");
    const double Ld = L;
    const cd b = Ps - PI + Ld * PI + Ld * PI * z + Ld * Ps * z;
    const cd disc = b * b - 4.0 * Ld * Ld * PI * Ps * (z + 1.0) * z;
    cd w = std::sqrt(disc);
    if (branch) {
        if (branch->has_value() && std::abs(-w - **branch) < std::abs(w - **branch))
            w = -w;
        *branch = w;
    }
    const cd den = b + w;
    if (std::abs(den) < 1e-300)
        return (b - w) / (2.0 * Ld * PI * Ps * z);
    // Rationalized minus root: (b - w) / (2 L PI Ps z) = 2 L (1 + z) / (b + w).
    return 2.0 * Ld * (1.0 + z) / den;
}

cd two_mass_stieltjes(cd s, double Ps, double PI, int L)
{
    const double Ld = L;
    return (Ld * Ps - Ld * s + PI - Ps) / (Ld * (Ps - s) * (PI - s));
}

double double_sided_residual(cd s, cd G, const DoubleSidedParams& p)
{
    const double Ld = p.L;
    const cd u = 1.0 + s * G;
    const cd z = -u;
    const cd b = p.Ps - p.PI + Ld * p.PI + Ld * p.PI * z + Ld * p.Ps * z;
    const cd Pi = (1.0 - p.gamma() * u) * (1.0 - p.alpha() * u) * (1.0 - p.eta() * u);
    const cd t1 = Ld * u * (1.0 - u);
    const cd t2 = b * G * Pi;
    const cd t3 = Ld * p.PI * p.Ps * G * G * Pi * Pi;
    const double scale = std::abs(t1) + std::abs(t2) + std::abs(t3);
    return scale > 0 ? std::abs(t1 - t2 - t3) / scale : 0.0;
}

namespace {

// L u (1 - u) - b G Pi(u) - L PI Ps G^2 Pi(u)^2 with u = 1 + sG, as a polynomial in G.
Poly double_sided_polynomial(cd s, const DoubleSidedParams& p)
{
    const double Ld = p.L;
    const Poly u{s, 1.0};
    const Poly one_minus_u{-s, 0.0};
    auto lin = [&](double r) { return Poly{-r * s, 1.0 - r}; }; // 1 - r u
    const Poly Pi = poly_mul(poly_mul(lin(p.gamma()), lin(p.alpha())), lin(p.eta()));
    const double c0 = p.Ps - p.PI + Ld * p.PI, c1 = Ld * (p.PI + p.Ps);
    const Poly b{-c1 * s, c0 - c1};
    const Poly G{1.0, 0.0};
    const Poly t1 = poly_scale(poly_mul(u, one_minus_u), Ld);
    const Poly t2 = poly_mul(poly_mul(b, G), Pi);
    const Poly GPi = poly_mul(G, Pi);
    const Poly t3 = poly_scale(poly_mul(GPi, GPi), Ld * p.PI * p.Ps);
    return poly_add(t1, poly_scale(poly_add(t2, t3), -1.0));
}

} // namespace

StieltjesEval stieltjes_double_sided(cd s, const DoubleSidedParams& p, const FixedPointOptions& opt)
{
    p.validate();
    if (s.imag() == 0.0 || !std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw DomainError("double_sided: argument must have nonzero imaginary part");
    const bool flip = s.imag() < 0;
    if (flip)
        s = std::conj(s);
    const double al = p.alpha(), et = p.eta(), ga = p.gamma();
    const double x = s.real();
    double lt = std::log10(std::max(kAnchor, s.imag()));
    const double l_end = std::log10(s.imag());

    cd sk(x, std::pow(10.0, lt));
    cd G = -1.0 / sk;
    std::optional<cd> br;
    int total_it = 0, steps = 0;

    auto map = [&](cd sv, cd g, std::optional<cd>& b) {
        const cd z = -1.0 - sv * g;
        const cd S = s_transform_two_mass(z, p.Ps, p.PI, p.L, &b) /
                     ((ga * z + 1.0) * (al * z + 1.0) * (et * z + 1.0));
        return 1.0 / (1.0 / S - sv);
    };
    auto finite = [](cd v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
    // G = 0 is an attracting spurious fixed point (S vanishes at z = -1).
    auto settled = [&](double step, cd g) { return step < opt.tolerance * std::max(std::abs(g), 1e-12); };
    auto accept = [&](cd g, cd sv) {
        if (!(std::abs(sv * g) > 1e-8 && g.imag() > -1e-12 * std::abs(g)))
            return false;
        // The second root of the two-mass quadratic diverges as z -> 0 and
        // makes G = -1/s a fixed point; the regular branch stays O(1/PI).
        std::optional<cd> b = br;
        const cd St = s_transform_two_mass(-1.0 - sv * g, p.Ps, p.PI, p.L, &b);
        return std::abs(St) * std::min(p.Ps, p.PI) < 1e3;
    };

    // Damped iteration; a step that fails is retried from its starting point
    // with lighter damping, then with Newton on G - T(G).
    auto solve_at = [&](cd sv) {
        const cd G0 = G;
        const std::optional<cd> br0 = br;
        double last = 0.0;
        for (double om : {opt.damping, 0.4 * opt.damping}) {
            G = G0;
            br = br0;
            for (int it = 0; it < opt.max_iterations; ++it) {
                const cd Gn = (1.0 - om) * G + om * map(sv, G, br);
                last = std::abs(Gn - G);
                G = Gn;
                ++total_it;
                if (!finite(G))
                    break;
                if (settled(last, G)) {
                    if (accept(G, sv))
                        return;
                    break;
                }
            }
        }
        G = G0;
        br = br0;
        for (int it = 0; it < 200; ++it) {
            std::optional<cd> b1 = br;
            const cd T0 = map(sv, G, b1);
            const cd dh = 1e-7 * std::max(std::abs(G), 1e-12);
            std::optional<cd> b2 = b1;
            const cd T1 = map(sv, G + dh, b2);
            const cd F = G - T0;
            const cd dF = 1.0 - (T1 - T0) / dh;
            const cd Gn = G - F / dF;
            br = b1;
            last = std::abs(Gn - G);
            G = Gn;
            ++total_it;
            if (!finite(G))
                break;
            if (settled(last, G)) {
                if (accept(G, sv))
                    return;
                break;
            }
        }
        // Last resort: Herglotz root of the branch-free polynomial nearest the
        // previous step, with the branch re-synced to it.
        {
            double best = std::numeric_limits<double>::infinity();
            cd pick;
            for (const cd r : poly_roots(double_sided_polynomial(sv, p))) {
                if (!(r.imag() > -1e-12 * std::abs(r)) || std::abs(1.0 + sv * r) < 1e-12)
                    continue;
                if (std::abs(r - G0) < best) {
                    best = std::abs(r - G0);
                    pick = r;
                }
            }
            if (std::isfinite(best)) {
                const cd u = 1.0 + sv * pick;
                const cd z = -u;
                const cd Pi = (ga * z + 1.0) * (al * z + 1.0) * (et * z + 1.0);
                const cd b = p.Ps - p.PI + double(p.L) * p.PI + double(p.L) * (p.PI + p.Ps) * z;
                G = pick;
                br = 2.0 * double(p.L) * (1.0 + z) * u / (pick * Pi) - b;
                ++total_it;
                return;
            }
        }
        std::ostringstream os;
        os << "double_sided: fixed point did not converge at s = (" << sv.real() << ", " << sv.imag()
           << ") after " << total_it << " iterations; last step " << last << ", G = (" << G.real() << ", "
           << G.imag() << ")";
        throw NumericalError(os.str());
    };

    solve_at(sk);
    const double h = 1.0 / opt.steps_per_decade;
    while (lt > l_end) {
        lt = std::max(l_end, lt - h);
        sk = cd(x, std::pow(10.0, lt));
        solve_at(sk);
        ++steps;
    }
    StieltjesEval ev;
    ev.s = flip ? std::conj(s) : s;
    ev.G = flip ? std::conj(G) : G;
    ev.law = "double_sided";
    ev.iterations = total_it;
    ev.path_steps = steps;
    ev.residual = double_sided_residual(s, G, p);
    return ev;
}

std::vector<MixtureComponent> mixture_from_counts(int K, const std::vector<int>& counts)
{
    if (counts.empty() || K < 1)
        throw ConfigError("mixture: need K >= 1 and at least one component");
    double n = 0.0;
    for (int c : counts) {
        if (c < 1)
            throw ConfigError("mixture: counts must be >= 1");
        n += c;
    }
    std::vector<MixtureComponent> out;
    for (int c : counts)
        out.push_back({c / n, static_cast<double>(K) / c});
    return out;
}

cd mixture_stieltjes(cd s, const std::vector<MixtureComponent>& comps)
{
    double wsum = 0.0;
    for (const auto& c : comps) {
        if (!(c.weight > 0 && c.weight <= 1.0) || !(c.ratio > 0))
            throw ConfigError("mixture: weight must be in (0,1] and ratio > 0");
        wsum += c.weight;
    }
    if (std::abs(wsum - 1.0) > 1e-12)
        throw ConfigError("mixture: weights must sum to 1");
    cd G = 0.0;
    for (const auto& c : comps)
        G += c.weight * mp_stieltjes(s, 1.0 / c.ratio);
    return G;
}

double s_stieltjes_link_check(const STransformFn& S, const StieltjesFn& G, const std::vector<cd>& grid)
{
    double worst = 0.0;
    for (const cd& s : grid) {
        if (s.imag() == 0.0)
            throw DomainError("link check: grid points must be off the real axis");
        const double sg = s.imag() > 0 ? 1.0 : -1.0;
        const double top = std::log10(std::max(kAnchor, std::abs(s.imag())));
        const double bot = std::log10(std::abs(s.imag()));
        auto at = [&](double lt) { return cd(s.real(), sg * std::pow(10.0, lt)); };

        // Branch state follows the path; near a branch point of S the step is
        // halved until the tracked value moves smoothly, and the hint is
        // extrapolated from the last two accepted values.
        std::optional<cd> br, prev;
        cd g = G(at(top));
        cd Sv = S(-at(top) * g - 1.0, br);
        double lt = top, h = (bot - top) / std::max(1.0, std::ceil((top - bot) * 40.0));
        while (lt > bot) {
            const double nt = std::max(bot, lt + h);
            std::optional<cd> b = br;
            if (br && prev)
                b = 2.0 * *br - *prev;
            const cd sk = nt == bot ? s : at(nt);
            const cd gk = G(sk);
            const cd Sk = S(-sk * gk - 1.0, b);
            const bool jump = br && b && std::abs(*b - *br) > 0.25 * std::max(std::abs(*b), std::abs(*br));
            if (jump && std::abs(h) > 1e-9) {
                h *= 0.5;
                continue;
            }
            prev = br;
            br = b;
            g = gk;
            Sv = Sk;
            lt = nt;
            h = std::max(h * 1.5, (bot - top) / std::max(1.0, std::ceil((top - bot) * 40.0)));
        }
        worst = std::max(worst, std::abs(Sv - g / (s * g + 1.0)));
    }
    return worst;
}

std::vector<double> density_from_stieltjes(const StieltjesFn& G, const std::vector<double>& xs, double eps)
{
    if (!(eps > 0))
        throw DomainError("density_from_stieltjes: eps must be > 0");
    std::vector<double> f(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) {
        try {
            f[i] = std::max(0.0, G(cd(xs[i], eps)).imag() / std::numbers::pi);
        } catch (const NumericalError& e) {
            std::ostringstream os;
            os << e.what() << " [density grid x = " << xs[i] << "]";
            throw NumericalError(os.str());
        }
    });
    return f;
}

cd empirical_stieltjes(const Mat& A, cd s)
{
    const Eigen::Index n = A.rows();
    if (A.cols() != n || n == 0)
        throw ShapeError("empirical_stieltjes: need a nonempty square matrix");
    Mat B = A - s * Mat::Identity(n, n);
    Eigen::PartialPivLU<Mat> lu(B);
    return lu.inverse().trace() / static_cast<double>(n);
}

cd empirical_stieltjes(const RVec& ev, cd s)
{
    if (ev.size() == 0)
        throw ShapeError("empirical_stieltjes: no eigenvalues");
    cd acc = 0.0;
    for (Eigen::Index i = 0; i < ev.size(); ++i)
        acc += 1.0 / (ev(i) - s);
    return acc / static_cast<double>(ev.size());
}

} // namespace physmimo
