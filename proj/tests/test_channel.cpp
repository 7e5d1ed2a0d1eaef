#include <doctest.h>

#include <algorithm>
#include <numbers>

#include "physmimo/channel.hpp"
#include "physmimo/stats.hpp"

using namespace physmimo;

TEST_CASE("steering vector examples")
{
    const Vec a = steering_vector(std::numbers::pi / 2, 4, 0.5);
    for (int m = 0; m < 4; ++m)
        CHECK(std::abs(a(m) - cd(1.0, 0.0)) < 1e-15);

    const Vec b = steering_vector(0.0, 2, 0.5);
    CHECK(std::abs(b(0) - cd(1.0, 0.0)) < 1e-15);
    CHECK(std::abs(b(1) - cd(-1.0, 0.0)) < 1e-15);

    const Vec c = steering_vector(1.0, 8, 2.0);
    CHECK(c.norm() == doctest::Approx(std::sqrt(8.0)).epsilon(1e-14));
    for (int m = 0; m < 8; ++m)
        CHECK(std::abs(c(m)) == doctest::Approx(1.0).epsilon(1e-14));
    // entry m = exp(-j 2 pi d (m-1) cos phi)
    CHECK(std::abs(c(3) - std::polar(1.0, -2.0 * std::numbers::pi * 2.0 * 3.0 * std::cos(1.0))) < 1e-12);
}

TEST_CASE("steering vector rejects angles outside [0, pi]")
{
    CHECK_THROWS_AS(steering_vector(-0.1, 4, 0.5), DomainError);
    CHECK_THROWS_AS(steering_vector(3.2, 4, 0.5), DomainError);
    CHECK_THROWS_AS(build_steering_matrix({0.1, 4.0}, 4, 0.5), DomainError);
}

TEST_CASE("steering norm is sqrt(M) for any angle and spacing")
{
    Rng rng = make_stream(3);
    for (int t = 0; t < 50; ++t) {
        const double phi = uniform(rng, 0.0, std::numbers::pi);
        const double d = uniform(rng, 0.1, 4.0);
        const int M = 1 + t * 7;
        const Vec v = steering_vector(phi, M, d);
        CHECK(v.norm() == doctest::Approx(std::sqrt(double(M))).epsilon(1e-12));
        CHECK(v.cwiseAbs().maxCoeff() == doctest::Approx(1.0).epsilon(1e-13));
        CHECK(v.cwiseAbs().minCoeff() == doctest::Approx(1.0).epsilon(1e-13));
    }
}

TEST_CASE("AoA draws")
{
    const auto big = draw_aoa_set(100000, 11);
    double mean = 0.0;
    for (double a : big)
        mean += a / big.size();
    CHECK(std::abs(mean - std::numbers::pi / 2) < 0.01);

    CHECK(draw_aoa_set(5, 42) == draw_aoa_set(5, 42));
    CHECK(draw_aoa_set(5, 42) != draw_aoa_set(5, 43));
    for (double a : draw_aoa_set(3, 7))
        CHECK((a >= 0.0 && a <= std::numbers::pi));
}

TEST_CASE("steering matrix")
{
    const Mat S1 = build_steering_matrix({std::numbers::pi / 2}, 3, 0.5);
    CHECK(S1.rows() == 3);
    CHECK(S1.cols() == 1);
    CHECK((S1 - Mat::Ones(3, 1)).norm() < 1e-15);
    CHECK(S1.squaredNorm() == doctest::Approx(3.0));

    const Mat S = build_steering_matrix(draw_aoa_set(50, 1), 100, 2.0);
    CHECK(std::abs(S.squaredNorm() - 100.0) < 1e-10);
    CHECK_THROWS_AS(build_steering_matrix({}, 4, 0.5), ConfigError);
}

TEST_CASE("spectrum of S^H S is bounded at M=400, P=200")
{
    // Frozen from a 100-seed oracle: lambda_max of S^H S averages about 11 at
    // d/lambda = 2 with a heavy upper tail from near-coincident AoAs (max ~ 23).
    double worst = 0.0, mean = 0.0;
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
        const Mat S = build_steering_matrix(draw_aoa_set(200, seed), 400, 2.0);
        Eigen::SelfAdjointEigenSolver<Mat> es(S.adjoint() * S, Eigen::EigenvaluesOnly);
        CHECK(es.eigenvalues().minCoeff() > -1e-9);
        worst = std::max(worst, es.eigenvalues().maxCoeff());
        mean += es.eigenvalues().maxCoeff() / 100.0;
    }
    CHECK(worst < 40.0);
    CHECK(mean > 8.0);
    CHECK(mean < 14.0);
}

TEST_CASE("realize_channel scenarios")
{
    SystemParams p;
    p.scenario = Scenario::iid;
    p.M = 4;
    p.K = 2;
    p.L = 2;
    const auto ch = realize_channel(p, 1);
    CHECK(ch.composite.rows() == 4);
    CHECK(ch.composite.cols() == 4);
    CHECK(ch.steering.empty());
    CHECK(ch.fading.empty());

    SystemParams q;
    q.M = 64;
    q.aoa_counts = {32};
    const auto a = realize_channel(q, 9);
    REQUIRE(a.steering.size() == 4);
    for (int i = 1; i < 4; ++i)
        CHECK(a.steering[i] == a.steering[0]);
    for (int i = 0; i < 4; ++i)
        CHECK((a.cell(i) - a.steering[i] * a.fading[i]).norm() < 1e-12);

    q.scenario = Scenario::distinct_aoas;
    q.aoa_counts = {32, 16, 8, 40};
    const auto d = realize_channel(q, 9);
    CHECK(d.steering[1].cols() == 16);
    CHECK(d.steering[3].cols() == 40);
    CHECK(d.steering[0] != d.steering[1].leftCols(16));

    // bit-identical for the same seed
    const auto d2 = realize_channel(q, 9);
    CHECK(d2.composite == d.composite);
}

TEST_CASE("column energy of identical-AoA channels")
{
    SystemParams p; // M=400, P=200, K=5, L=4
    std::vector<double> acc(20, 0.0);
    for (int t = 0; t < 1000; ++t) {
        Rng rng = make_stream(100, t);
        const auto ch = realize_channel(p, rng);
        for (int k = 0; k < 20; ++k)
            acc[k] += ch.composite.col(k).squaredNorm() / p.M / 1000.0;
    }
    for (double v : acc)
        CHECK(std::abs(v - 1.0) < 0.02);
}

TEST_CASE("user correlation |h_k^H h_l| / M at M=400, P=200")
{
    // For K << P the normalized inner product has Rayleigh-like magnitude with
    // E|.|^2 ~ 1/P + 1/M, so its median is sqrt(ln 2 (1/P + 1/M)) ~ 0.072.
    SystemParams p;
    p.K = 2;
    p.L = 1;
    std::vector<double> v;
    for (int t = 0; t < 100; ++t) {
        const auto ch = realize_channel(p, 1000 + t);
        v.push_back(std::abs(ch.composite.col(0).dot(ch.composite.col(1))) / p.M);
    }
    const double theory = std::sqrt(std::log(2.0) * (1.0 / 200 + 1.0 / 400));
    CHECK(std::abs(median(v) - theory) < 0.15 * theory);
    CHECK(median(v) < 0.1);
}

TEST_CASE("validation")
{
    SystemParams p;
    p.aoa_counts = {4};
    try {
        p.validate();
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("K") != std::string::npos);
        CHECK(msg.find("aoa_counts") != std::string::npos);
    }
    p.aoa_counts = {20};
    const auto w = p.validate();
    CHECK(w.size() == 1); // K/P = 0.25 > 0.2
    p.aoa_counts = {200};
    CHECK(p.validate().empty());
    p.Ps = 0.0;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.Ps = 0.1;
    p.K = 2000;
    CHECK_THROWS_AS(p.validate(), ConfigError);
    p.K = 5;
    p.scenario = Scenario::distinct_aoas;
    p.aoa_counts = {200, 200};
    CHECK_THROWS_AS(p.validate(), ConfigError);
    CHECK(scenario_from_string("identical") == Scenario::identical_aoas);
    CHECK_THROWS_AS(scenario_from_string("bogus"), ConfigError);
}

TEST_CASE("received block")
{
    SystemParams p;
    p.M = 20;
    p.N = 30;
    p.aoa_counts = {10};
    const auto ch = realize_channel(p, 2);
    std::vector<Mat> X(4, Mat::Zero(5, 30));
    CHECK(received_block(ch, p, X, 3).Y.norm() == 0.0);

    std::vector<Mat> bad(4, Mat::Zero(5, 29));
    bad[0] = Mat::Zero(4, 29);
    CHECK_THROWS_AS(received_block(ch, p, bad, 3), ShapeError);

    // single cell, identity-padded symbols: column k of Y is sqrt(Ps) h_k
    SystemParams q = p;
    q.L = 1;
    q.N = 8;
    const auto c1 = realize_channel(q, 5);
    Mat Xi = Mat::Zero(5, 8);
    Xi.leftCols(5) = Mat::Identity(5, 5);
    const auto blk = received_block(c1, q, {Xi}, 6);
    for (int k = 0; k < 5; ++k)
        CHECK((blk.Y.col(k) - std::sqrt(q.Ps) * c1.composite.col(k)).norm() < 1e-14);

    // exact superposition
    p.noise_enabled = true;
    Rng rng = make_stream(7);
    std::vector<Mat> Xr;
    for (int i = 0; i < 4; ++i)
        Xr.push_back(cn_matrix(5, 30, rng));
    const auto b = received_block(ch, p, Xr, 8);
    Mat ref = b.W;
    for (int i = 0; i < 4; ++i)
        ref += std::sqrt(i == 0 ? p.Ps : p.PI) * ch.cell(i) * Xr[i];
    CHECK((b.Y - ref).norm() < 1e-12);
    const auto b2 = received_block(ch, p, Xr, 8);
    CHECK(b2.Y == b.Y);
}

TEST_CASE("received block energy")
{
    SystemParams p;
    p.M = 100;
    p.N = 400;
    p.aoa_counts = {50};
    p.noise_enabled = true;
    double e = 0.0;
    const int blocks = 1000;
    for (int t = 0; t < blocks; ++t) {
        Rng rng = make_stream(77, t);
        const auto ch = realize_channel(p, rng);
        std::vector<Mat> X;
        for (int i = 0; i < p.L; ++i)
            X.push_back(cn_matrix(p.K, p.N, rng));
        e += received_block(ch, p, X, rng).Y.squaredNorm() / (double(p.M) * p.N * blocks);
    }
    const double expect = p.K * p.Ps + p.K * (p.L - 1) * p.PI + 1.0;
    CHECK(expect == doctest::Approx(1.875));
    CHECK(std::abs(e - expect) < 0.02 * expect);
}
