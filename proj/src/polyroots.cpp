#include "physmimo/polyroots.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

namespace physmimo {

Poly poly_mul(const Poly& a, const Poly& b)
{
    if (a.empty() || b.empty())
        return {};
    Poly r(a.size() + b.size() - 1, cd(0.0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    return r;
}

Poly poly_add(const Poly& a, const Poly& b)
{
    Poly r(std::max(a.size(), b.size()), cd(0.0));
    std::size_t oa = r.size() - a.size(), ob = r.size() - b.size();
    for (std::size_t i = 0; i < a.size(); ++i)
        r[oa + i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i)
        r[ob + i] += b[i];
    return r;
}

Poly poly_scale(const Poly& a, cd k)
{
    Poly r(a);
    for (auto& c : r)
        c *= k;
    return r;
}

Poly poly_derivative(const Poly& a)
{
    if (a.size() <= 1)
        return {cd(0.0)};
    const std::size_t n = a.size() - 1;
    Poly d(n);
    for (std::size_t i = 0; i < n; ++i)
        d[i] = a[i] * static_cast<double>(n - i);
    return d;
}

cd poly_eval(const Poly& a, cd x)
{
    cd r = 0.0;
    for (const auto& c : a)
        r = r * x + c;
    return r;
}

Poly compose_affine(const Poly& in_u, cd x)
{
    // Horner in u with u = 1 + x s.
    Poly res{cd(0.0)};
    const Poly u{x, cd(1.0)};
    for (const auto& c : in_u)
        res = poly_add(poly_mul(res, u), Poly{c});
    return res;
}

std::vector<cd> poly_roots(const Poly& c, double rel_zero)
{
    double mx = 0.0;
    for (const auto& v : c)
        mx = std::max(mx, std::abs(v));
    if (mx == 0.0)
        return {};
    std::size_t first = 0;
    while (first < c.size() && std::abs(c[first]) <= rel_zero * mx)
        ++first;
    Poly p(c.begin() + static_cast<std::ptrdiff_t>(first), c.end());
    const int n = static_cast<int>(p.size()) - 1;
    if (n <= 0)
        return {};
    std::vector<cd> roots;
    if (n == 1) {
        roots.push_back(-p[1] / p[0]);
    } else {
        Mat comp = Mat::Zero(n, n);
        for (int j = 0; j < n; ++j)
            comp(0, j) = -p[static_cast<std::size_t>(j + 1)] / p[0];
        for (int i = 1; i < n; ++i)
            comp(i, i - 1) = 1.0;
        Eigen::ComplexEigenSolver<Mat> es(comp, false);
        if (es.info() != Eigen::Success)
            throw NumericalError("poly_roots: companion eigensolver failed");
        for (int i = 0; i < n; ++i)
            roots.push_back(es.eigenvalues()(i));
    }
    const Poly dp = poly_derivative(p);
    for (auto& r : roots) {
        for (int it = 0; it < 3; ++it) {
            cd f = poly_eval(p, r);
            cd d = poly_eval(dp, r);
            if (d == cd(0.0))
                break;
            cd nr = r - f / d;
            if (!std::isfinite(nr.real()) || !std::isfinite(nr.imag()))
                break;
            if (std::abs(poly_eval(p, nr)) > std::abs(f))
                break;
            r = nr;
        }
    }
    return roots;
}

std::vector<double> real_roots(const Poly& c, double imag_tol)
{
    std::vector<double> out;
    for (const auto& r : poly_roots(c))
        if (std::abs(r.imag()) <= imag_tol * std::max(1.0, std::abs(r)))
            out.push_back(r.real());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace physmimo
