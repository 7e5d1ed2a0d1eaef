#include "physmimo/rmt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "physmimo/rng.hpp"

namespace physmimo {

namespace {

struct InvPoint {
    double s;
    double ds; // ds/dx on this branch
};

std::vector<InvPoint> inverse_points(const InverseFn& f, double x)
{
    const Poly c = f(cd(x, 0.0));
    Poly cr(c.size());
    for (std::size_t i = 0; i < c.size(); ++i)
        cr[i] = cd(c[i].real(), 0.0);
    const std::vector<double> rs = real_roots(cr);
    // Complex-step derivative of the coefficients with respect to x.
    const double h = 1e-20 * std::max(1.0, std::abs(x));
    const Poly cx = f(cd(x, h));
    const Poly dc = poly_derivative(cr);
    std::vector<InvPoint> out;
    out.reserve(rs.size());
    for (double s : rs) {
        const double fx = poly_eval(cx, cd(s, 0.0)).imag() / h;
        const double fs = poly_eval(dc, cd(s, 0.0)).real();
        double d;
        if (fs != 0.0)
            d = -fx / fs;
        else
            d = fx > 0 ? -1e300 : 1e300;
        out.push_back({s, d});
    }
    return out;
}

std::vector<double> log_grid(double lo, double hi, int n)
{
    std::vector<double> g(static_cast<std::size_t>(n));
    const double a = std::log10(lo), b = std::log10(hi);
    for (int i = 0; i < n; ++i)
        g[static_cast<std::size_t>(i)] = std::pow(10.0, a + (b - a) * i / (n - 1));
    return g;
}

using Interval = std::pair<double, double>;

std::vector<Interval> merge_intervals(std::vector<Interval> v, double tol)
{
    std::sort(v.begin(), v.end());
    std::vector<Interval> m;
    for (const auto& iv : v) {
        if (!m.empty() && iv.first <= m.back().second + tol)
            m.back().second = std::max(m.back().second, iv.second);
        else
            m.push_back(iv);
    }
    return m;
}

std::vector<Interval> gaps_of(const std::vector<Interval>& merged)
{
    std::vector<Interval> g;
    for (std::size_t k = 0; k + 1 < merged.size(); ++k)
        if (merged[k + 1].first > merged[k].second)
            g.emplace_back(merged[k].second, merged[k + 1].first);
    return g;
}

} // namespace

SpectralSupport SpectralSupport::scaled(double k) const
{
    SpectralSupport r = *this;
    for (auto& iv : r.intervals) {
        iv.first *= k;
        iv.second *= k;
    }
    return r;
}

bool SpectralSupport::contains(double v, double dilation) const
{
    for (const auto& iv : intervals) {
        const double w = iv.second - iv.first;
        if (v >= iv.first - dilation * w && v <= iv.second + dilation * w)
            return true;
    }
    return false;
}

double SpectralSupport::gap(std::size_t k) const
{
    if (k + 1 >= intervals.size())
        return 0.0;
    return intervals[k + 1].first - intervals[k].second;
}

SpectralSupport support_from_inverse(const InverseFn& f, const SupportGrid& grid, const SupportOptions& opt)
{
    if (!(grid.x_min > 0) || !(grid.x_max > grid.x_min) || grid.points < 10)
        throw ConfigError("support grid: need 0 < x_min < x_max and at least 10 points");

    const std::vector<double> pos = log_grid(grid.x_min, grid.x_max, grid.points);
    std::vector<double> neg(pos.rbegin(), pos.rend());
    for (auto& v : neg)
        v = -v;

    // Both halves are traversed with increasing x.
    std::vector<double> xs;
    xs.reserve(2 * pos.size());
    xs.insert(xs.end(), neg.begin(), neg.end());
    xs.insert(xs.end(), pos.begin(), pos.end());
    std::vector<std::vector<InvPoint>> pts(xs.size());
    parallel_for(xs.size(), [&](std::size_t i) { pts[i] = inverse_points(f, xs[i]); });

    SpectralSupport out;
    out.grid = grid;
    std::vector<Interval> removed;
    int collisions = 0;
    const std::size_t half = pos.size();

    for (std::size_t h = 0; h < 2; ++h) {
        const std::size_t beg = h * half, end = beg + half;
        for (std::size_t i = beg + 1; i < end; ++i) {
            const double dx = xs[i] - xs[i - 1];
            const auto& P0 = pts[i - 1];
            const auto& P1 = pts[i];
            for (std::size_t j = 0; j + 1 < P1.size(); ++j) {
                const double a = P1[j].s, b = P1[j + 1].s;
                if (std::abs(b - a) <= 1e-9 * std::max({1e-12, std::abs(a), std::abs(b)}) && collisions < 5) {
                    std::ostringstream os;
                    os << "root collision near x = " << xs[i] << ", s = " << a;
                    out.warnings.push_back(os.str());
                    ++collisions;
                }
            }
            if (P0.empty())
                continue;
            for (const auto& q1 : P1) {
                std::size_t k = 0;
                double best = 1e300;
                for (std::size_t kk = 0; kk < P0.size(); ++kk) {
                    const double e = std::abs(P0[kk].s + P0[kk].ds * dx - q1.s);
                    if (e < best) {
                        best = e;
                        k = kk;
                    }
                }
                const auto& q0 = P0[k];
                const double d0 = q0.ds, d1 = q1.ds;
                if (!std::isfinite(d0) || !std::isfinite(d1) || std::abs(d0) > 1e299 || std::abs(d1) > 1e299)
                    continue;
                // Same branch when the trapezoid prediction agrees with the step.
                const double trap = q0.s + 0.5 * (d0 + d1) * dx;
                const double tol = 0.125 * (std::abs(d0) + std::abs(d1)) * dx +
                                   1e-12 * (std::abs(q0.s) + std::abs(q1.s));
                if (std::abs(q1.s - trap) > tol)
                    continue;
                if (d0 > 0 && d1 > 0) {
                    removed.emplace_back(q0.s, q1.s);
                } else if (d0 > 0 && d1 <= 0) {
                    const double frac = d0 / (d0 - d1);
                    removed.emplace_back(q0.s, q0.s + 0.5 * d0 * frac * dx);
                } else if (d0 <= 0 && d1 > 0) {
                    const double frac = -d0 / (d1 - d0);
                    removed.emplace_back(q1.s - 0.5 * d1 * (1.0 - frac) * dx, q1.s);
                }
            }
        }
    }

    for (auto& iv : removed)
        if (iv.first > iv.second)
            std::swap(iv.first, iv.second);

    std::vector<Interval> gaps = gaps_of(merge_intervals(removed, 0.0));
    double scale = 0.0;
    for (const auto& g : gaps)
        if (g.second > 0)
            scale = std::max({scale, std::abs(g.first), std::abs(g.second)});
    if (scale == 0.0)
        scale = 1.0;
    gaps = gaps_of(merge_intervals(removed, 1e-6 * scale));

    for (auto g : gaps) {
        if (g.second <= 0)
            continue;
        if (opt.atom_at_zero && g.first <= 0)
            continue;
        g.first = std::max(g.first, 0.0);
        if (g.second - g.first <= 1e-6 * scale)
            continue;
        out.intervals.push_back(g);
    }

    if (out.intervals.empty()) {
        out.coverage_complete = false;
        out.warnings.emplace_back("no support interval found on the x grid");
        return out;
    }
    // A run still increasing at a grid end inside the support window was cut short.
    const double lo = out.intervals.front().first, hi = out.intervals.back().second;
    // Near x = 0 a root that runs straight through (same s at -x_min and +x_min)
    // is not a Stieltjes branch. With an atom at zero, the atom branch s ~ -w/x
    // reaches the large-|x| ends below the bulk.
    auto crosses_zero = [&](std::size_t idx, double s) {
        const std::size_t other = idx == half - 1 ? half : half - 1;
        for (const auto& r : pts[other])
            if (std::abs(r.s - s) <= 1e-6 * std::max(std::abs(s), 1e-300))
                return true;
        return false;
    };
    for (std::size_t idx : {std::size_t(0), half - 1, half, 2 * half - 1}) {
        const bool inner = idx == half - 1 || idx == half;
        const double floor = (opt.atom_at_zero && !inner ? 0.5 : 0.05) * lo;
        for (const auto& q : pts[idx]) {
            if (inner && crosses_zero(idx, q.s))
                continue;
            if (q.ds > 0 && q.s > floor && q.s < 2.0 * hi) {
                out.coverage_complete = false;
                std::ostringstream os;
                os << "incomplete x-grid coverage: increasing branch at grid end x = " << xs[idx]
                   << " (s = " << q.s << "); widen the grid";
                out.warnings.push_back(os.str());
                break;
            }
        }
    }
    return out;
}

Poly onesided_support_cubic(cd x, const OneSidedParams& p)
{
    const double a = p.a, l = p.l, M = p.m, N = p.n, P = p.p;
    const cd x2 = x * x, x3 = x2 * x, x4 = x3 * x;
    return {a * l * l * l * x4, -a * l * l * x3 * (-3.0 * l + M + N + P),
            x * (M * N * P + a * l * x * (3.0 * l * l + M * N + (M + N) * P - 2.0 * l * (M + N + P))),
            M * N * P - a * x * (-l + M) * (l - N) * (l - P)};
}

SpectralSupport support_onesided(const OneSidedParams& p, const SupportGrid& grid)
{
    p.validate();
    return support_from_inverse([&](cd x) { return onesided_support_cubic(x, p); }, grid);
}

ValidityReport truncation_validity(double alpha, double eta, double gamma, double threshold)
{
    ValidityReport r;
    const double s1 = alpha + eta + gamma;
    r.ratio_linear_cubic = s1 / (alpha * eta * gamma);
    r.ratio_linear_quadratic = s1 / (alpha * gamma + alpha * eta + eta * gamma);
    r.suspect = r.ratio_linear_cubic < threshold || r.ratio_linear_quadratic < threshold;
    return r;
}

Poly double_sided_support_quadratic(cd x, const DoubleSidedParams& p)
{
    const double K = p.K, L = p.L, M = p.M, N = p.N, P = p.P, Ps = p.Ps, PI = p.PI;
    const cd A = 2.0 * K * L * L * PI * Ps * x * (1.0 / M + 1.0 / N + 1.0 / P) + L * (PI + Ps);
    const cd C = L * PI - PI + Ps + 2.0 * L * PI * Ps * x;
    const double q2 = L * L * (Ps - PI) * (Ps - PI);
    const double q1 = 2.0 * L * (1.0 - L) * PI * PI - 2.0 * L * Ps * Ps + 2.0 * L * L * PI * Ps;
    const double q0 = ((L - 1.0) * PI + Ps) * ((L - 1.0) * PI + Ps);
    // Squaring A v - C = -sqrt(Q(v)) keeps both signs of the square root.
    const Poly in_v{A * A - q2, -2.0 * A * C - q1, C * C - q0};
    return compose_affine(in_v, x);
}

DoubleSidedSupport support_double_sided(const DoubleSidedParams& p, const SupportGrid& grid)
{
    std::vector<std::string> w = p.validate();
    DoubleSidedSupport r;
    r.support = support_from_inverse([&](cd x) { return double_sided_support_quadratic(x, p); }, grid);
    r.validity = truncation_validity(p.alpha(), p.eta(), p.gamma());
    if (r.validity.suspect)
        w.emplace_back("truncation conditions not satisfied (ratio < 10); quadratic approximation suspect");
    r.support.warnings.insert(r.support.warnings.end(), w.begin(), w.end());
    if (r.support.intervals.empty())
        throw NumericalError("support_double_sided: complex roots over the whole grid, empty support");
    return r;
}

Poly distinct_support_cubic(cd x, int K, int L, int M, int N, int P, double PI)
{
    const double Kd = K, Ld = L, Md = M, Nd = N, Pd = P;
    const double l = Kd * (Ld - 1.0), pp = (Ld - 1.0) * Pd;
    // Polynomial in u = 1 + s x.
    Poly t1 = poly_mul(Poly{-Nd * PI * x, 0.0}, Poly{Nd, -l});
    t1 = poly_mul(t1, Poly{Nd, -pp});
    const Poly t2{Md * PI * x * Nd * Nd, -Md * Nd * (Ld - 1.0) * (Pd + PI * x * (Kd + Pd)),
                  Md * Kd * Pd * PI * x * (Ld - 1.0) * (Ld - 1.0)};
    return compose_affine(poly_add(t1, t2), x);
}

SpectralSupport support_distinct(int K, int L, int M, int N, int P, double PI, const SupportGrid& grid)
{
    if (K < 1 || L < 2 || M < 1 || N < 1 || P < 1)
        throw ConfigError("support_distinct: need K, M, N, P >= 1 and L >= 2");
    if (!(PI > 0))
        throw ConfigError("support_distinct: PI must be > 0");
    SupportOptions opt;
    opt.atom_at_zero = true;
    return support_from_inverse([&](cd x) { return distinct_support_cubic(x, K, L, M, N, P, PI); }, grid, opt);
}

} // namespace physmimo
