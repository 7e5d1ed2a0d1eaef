#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "physmimo/common.hpp"
#include "physmimo/polyroots.hpp"

namespace physmimo {

// One-sided law of a*(ABC)^H(ABC)/(m p n), A: m x p, B: p x l, C: l x n.
struct OneSidedParams {
    double a = 0.1;
    int l = 5;
    int m = 400;
    int n = 1000;
    int p = 200;

    double alpha() const { return static_cast<double>(l) / m; }
    double beta() const { return static_cast<double>(p) / m; }
    double gamma() const { return static_cast<double>(l) / n; }
    double alpha_prime() const { return static_cast<double>(l) / p; }
    void validate() const;
};

// Joint law of the signal and interference clusters (identical AoAs).
struct DoubleSidedParams {
    int K = 5;
    int L = 4;
    int M = 400;
    int N = 1000;
    int P = 200;
    double Ps = 0.1;
    double PI = 0.025;

    double alpha() const { return static_cast<double>(K) * L / M; }
    double eta() const { return static_cast<double>(K) * L / P; }
    double gamma() const { return static_cast<double>(K) * L / N; }
    std::vector<std::string> validate() const;
};

struct StieltjesEval {
    cd s;
    cd G;
    std::string law;
    int path_steps = 0;
    int iterations = 0;
    double residual = 0.0;
};

// Marchenko-Pastur law with ratio beta (dimension / samples), unit variance:
// beta s G^2 + (s - 1 + beta) G + 1 = 0.
cd mp_stieltjes(cd s, double beta);

// Quartic in G for the one-sided law (coefficients highest first).
Poly onesided_polynomial(cd s, const OneSidedParams& p);
StieltjesEval stieltjes_onesided(cd s, const OneSidedParams& p);

// Rich-scattering limit (cubic in G).
Poly iid_limit_polynomial(cd s, double Ps, double alpha, double gamma);
StieltjesEval stieltjes_iid_limit(cd s, double Ps, double alpha, double gamma);

// S-transform of the two-mass law (mass 1/L at Ps, (L-1)/L at PI).
// Without a hint the principal square root is used; with a hint the sign of
// the square root closest to *hint is taken and written back, so callers can
// follow the branch continuously.
cd s_transform_two_mass(cd z, double Ps, double PI, int L, std::optional<cd>* branch = nullptr);
cd two_mass_stieltjes(cd s, double Ps, double PI, int L);

struct FixedPointOptions {
    double damping = 0.5;
    int max_iterations = 10000;
    double tolerance = 1e-10;
    int steps_per_decade = 10;
};

StieltjesEval stieltjes_double_sided(cd s, const DoubleSidedParams& p, const FixedPointOptions& opt = {});
// Branch-free residual of the squared fixed-point equation.
double double_sided_residual(cd s, cd G, const DoubleSidedParams& p);

struct MixtureComponent {
    double weight; // lambda_i = P_i / n
    double ratio;  // beta_i = K / P_i
};

std::vector<MixtureComponent> mixture_from_counts(int K, const std::vector<int>& counts);
// Weighted sum of component laws; component i is the law of H_i H_i^H / K for a
// P_i x K Gaussian H_i (MP with ratio 1/beta_i, atom 1 - beta_i at zero).
cd mixture_stieltjes(cd s, const std::vector<MixtureComponent>& comps);

using StieltjesFn = std::function<cd(cd)>;
using STransformFn = std::function<cd(cd, std::optional<cd>&)>;

// Max |S(-sG-1) - G/(sG+1)| over the grid. The S-transform branch state is
// carried along a vertical path from Im s = 1e6 to each grid point.
double s_stieltjes_link_check(const STransformFn& S, const StieltjesFn& G, const std::vector<cd>& grid);

// f(x) = max(0, Im G(x + i eps) / pi).
std::vector<double> density_from_stieltjes(const StieltjesFn& G, const std::vector<double>& xs, double eps = 1e-3);

// (1/n) tr (A - sI)^{-1} for Hermitian A.
cd empirical_stieltjes(const Mat& A, cd s);
cd empirical_stieltjes(const RVec& eigenvalues, cd s);

// ---- supports ----

struct SupportGrid {
    double x_min = 1e-6;
    double x_max = 1e3;
    int points = 10000; // per sign

    bool operator==(const SupportGrid&) const = default;
};

struct SpectralSupport {
    std::vector<std::pair<double, double>> intervals;
    SupportGrid grid;
    std::vector<std::string> warnings;
    bool coverage_complete = true;

    SpectralSupport scaled(double k) const;
    bool contains(double v, double dilation = 0.0) const;
    // Width of the gap between intervals k and k+1 (0 when absent).
    double gap(std::size_t k = 0) const;
};

// Polynomial in s whose real roots are the inverse function s(x).
using InverseFn = std::function<Poly(cd x)>;

struct SupportOptions {
    bool atom_at_zero = false;
};

SpectralSupport support_from_inverse(const InverseFn& f, const SupportGrid& grid, const SupportOptions& opt = {});

Poly onesided_support_cubic(cd x, const OneSidedParams& p);
SpectralSupport support_onesided(const OneSidedParams& p, const SupportGrid& grid = {});

struct ValidityReport {
    double ratio_linear_cubic = 0.0;     // (a+e+g)/(a e g)
    double ratio_linear_quadratic = 0.0; // (a+e+g)/(a g + a e + e g)
    bool suspect = false;
};

ValidityReport truncation_validity(double alpha, double eta, double gamma, double threshold = 10.0);

Poly double_sided_support_quadratic(cd x, const DoubleSidedParams& p);

struct DoubleSidedSupport {
    SpectralSupport support;
    ValidityReport validity;
};

DoubleSidedSupport support_double_sided(const DoubleSidedParams& p, const SupportGrid& grid = {});

Poly distinct_support_cubic(cd x, int K, int L, int M, int N, int P, double PI);
SpectralSupport support_distinct(int K, int L, int M, int N, int P, double PI, const SupportGrid& grid = {});

} // namespace physmimo
