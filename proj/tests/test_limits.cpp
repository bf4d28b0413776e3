#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "peelab/limits.hpp"
#include "peelab/rng.hpp"
#include "test_util.hpp"

using namespace peelab;

TEST_CASE("constants tables") {
    const auto t2 = constants(ModelId::TypeII);
    CHECK(t2.h_star_d == Catch::Approx(std::pow(16.0 / 3.0, 1.0 / 3.0)).epsilon(1e-14));
    CHECK(t2.h_star_d == Catch::Approx(1.7471609).epsilon(1e-6));
    CHECK(t2.c1 == RadicalExpr(4));
    CHECK(t2.c2 == RadicalExpr(3));
    CHECK(t2.p / (t2.h * t2.h) == RadicalExpr(4));
    CHECK(t2.p_d == Catch::Approx(std::pow(2.0 / 3.0, 2.0 / 3.0)));
    CHECK(t2.v_d == Catch::Approx(std::pow(2.0 / 3.0, 7.0 / 3.0)));
    CHECK(t2.h_d == Catch::Approx(std::pow(12.0, -1.0 / 3.0)));
    CHECK(t2.t_d == Catch::Approx(0.25 / std::sqrt(M_PI)));

    const auto t1 = constants(ModelId::TypeI);
    CHECK(t1.p_d == Catch::Approx(std::pow(3.0, -1.0 / 3.0)));
    CHECK(t1.v_d == Catch::Approx(4.0 * std::pow(3.0, -5.0 / 3.0)));
    CHECK(t1.h_d == Catch::Approx(0.5 * std::pow(3.0, -1.0 / 6.0)));
    CHECK(t1.b_d == Catch::Approx(4.0 / 3.0));
    CHECK(t1.a_d == Catch::Approx(0.5 / std::sqrt(3.0)));

    const auto tq = constants(ModelId::Quad);
    CHECK(tq.v == RadicalExpr::monomial(1, Rat(1, 3), 0)); // 2^{1/3}
    CHECK(tq.b_d == Catch::Approx(4.5));
    CHECK(tq.h_d == Catch::Approx(std::pow(2.0, -2.0 / 3.0)));
    CHECK(tq.a_star_d == Catch::Approx(0.5));
    CHECK(tq.c1_d == Catch::Approx(2.25));

    // symbolic identities hold for every model
    for (ModelId m : {ModelId::TypeII, ModelId::TypeI, ModelId::Quad}) {
        const auto ct = constants(m);
        CHECK(ct.v == ct.p * ct.p * ct.b);
        CHECK(ct.h == ct.a / ct.p);
        CHECK(ct.c1 == ct.h_star / ct.h);
        CHECK(ct.c2 == RadicalExpr(1) / (ct.p * ct.h));
    }
}

TEST_CASE("laplace_L") {
    CHECK(laplace_L(0.0, 3.0) == 1.0);
    CHECK(laplace_L(4.0, 1.0) == Catch::Approx(std::pow(2.0, -1.5)).epsilon(1e-14));
    CHECK_THROWS_AS(laplace_L(-1.0, 1.0), DomainError);

    // -d/dl at 0 equals 3 s^2 / 8 by central differences
    for (double s : {0.5, 1.0, 2.0}) {
        const double eps = 1e-6;
        const double der = (laplace_L(eps, s) - laplace_L(0, s)) / eps;
        CHECK(std::abs(-der - 3.0 * s * s / 8.0) < 1e-5 * std::max(1.0, s * s));
    }

    // functional equality with the Gamma(3/2, s^2/4) transform
    for (double s : {0.3, 1.0, 2.5})
        for (double lam : {0.1, 0.7, 3.0}) {
            const double gamma_form = std::pow(1.0 + (s * s / 4.0) * lam, -1.5);
            CHECK(laplace_L(lam, s) == gamma_form);
        }
}

TEST_CASE("laplace_M") {
    CHECK(laplace_M(0.0, 1.0) == Catch::Approx(1.0).epsilon(1e-15));
    double prev = 1.0 + 1e-12;
    for (double lam : {0.0, 0.5, 1.0, 2.0, 4.0}) {
        const double v = laplace_M(lam, 1.0);
        CHECK(v < prev);
        CHECK(v > 0);
        prev = v;
    }
    // dual-route evaluation agreement
    for (double lam : {0.25, 1.0, 3.0})
        for (double s : {0.5, 1.0, 2.0})
            CHECK(laplace_M(lam, s) == Catch::Approx(laplace_M_alt(lam, s)).epsilon(1e-12));
    CHECK_THROWS_AS(laplace_M(1.0, -2.0), DomainError);
}

TEST_CASE("transforms are log-convex on grids") {
    auto logconvex = [](auto f) {
        for (double lam : {0.2, 0.6, 1.4, 3.0}) {
            const double d = 0.1;
            const double a = std::log(f(lam - d)), b = std::log(f(lam)),
                         c = std::log(f(lam + d));
            REQUIRE(a + c >= 2 * b - 1e-12);
        }
    };
    logconvex([](double l) { return laplace_L(l, 1.0); });
    logconvex([](double l) { return laplace_M(l, 1.0); });
    logconvex([](double l) { return xi_laplace(l); });
}

TEST_CASE("xi reference law") {
    CHECK(xi_laplace(0.0) == 1.0);
    CHECK(xi_laplace(0.5) == Catch::Approx(2.0 / M_E).epsilon(1e-14));
    CHECK_THROWS_AS(xi_laplace(-0.1), DomainError);
    CHECK_THROWS_AS(xi_density(-0.1), DomainError);

    // density integrates to one and has mean one: substitute x = 1/z^2 to
    // tame both tails, then adaptive Simpson; the mean integrand decays
    // like x^{-3/2}, so its x-range must reach ~1e12
    const double norm = testutil::integrate(
        [](double z) { return xi_density(1.0 / (z * z)) * 2.0 / (z * z * z); }, 1e-6, 60.0,
        1e-12);
    CHECK(std::abs(norm - 1.0) < 1e-8);
    const double mean = testutil::integrate(
        [](double z) {
            return (1.0 / (z * z)) * xi_density(1.0 / (z * z)) * 2.0 / (z * z * z);
        },
        5e-7, 60.0, 1e-13);
    CHECK(std::abs(mean - 1.0) < 1e-6);

    // Laplace transform consistent with the density by quadrature
    const double lt = testutil::integrate(
        [](double z) {
            const double x = 1.0 / (z * z);
            return std::exp(-x) * xi_density(x) * 2.0 / (z * z * z);
        },
        1e-3, 60.0, 1e-13);
    CHECK(lt == Catch::Approx(xi_laplace(1.0)).epsilon(1e-6));
}

TEST_CASE("empirical laplace") {
    CHECK_THROWS_AS(empirical_laplace({}, {1.0}), DomainError);
    CHECK_THROWS_AS(empirical_laplace(std::vector<double>(5, 1.0), {1.0}), DomainError);

    // all-zero samples: value one, zero-width CI
    const auto z = empirical_laplace(std::vector<double>(500, 0.0), {0.5, 2.0});
    for (const auto& e : z.laplace) {
        CHECK(e.value == 1.0);
        CHECK(e.ci_lo == 1.0);
        CHECK(e.ci_hi == 1.0);
    }

    // Exp(1) samples at lambda = 1 give 1/2 inside the CI
    Rng rng(2031, 0);
    std::vector<double> xs(100000);
    for (auto& x : xs) x = rng.exponential(1.0);
    const auto s = empirical_laplace(xs, {1.0});
    CHECK(s.laplace[0].ci_lo <= 0.5);
    CHECK(s.laplace[0].ci_hi >= 0.5);
    CHECK(s.laplace[0].value == Catch::Approx(0.5).margin(0.01));

    // CI width shrinks like n^{-1/2}
    std::vector<double> quarter(xs.begin(), xs.begin() + 25000);
    const auto sq = empirical_laplace(quarter, {1.0});
    const double w_small = sq.laplace[0].ci_hi - sq.laplace[0].ci_lo;
    const double w_big = s.laplace[0].ci_hi - s.laplace[0].ci_lo;
    CHECK(w_small / w_big == Catch::Approx(2.0).margin(0.4));
}

TEST_CASE("ks two-sample") {
    std::vector<double> a(1000), b(1000);
    for (int i = 0; i < 1000; ++i) a[i] = b[i] = i * 0.001;
    const auto same = ks_two_sample(a, b, 0.01);
    CHECK(same.statistic == 0.0);
    CHECK(same.pass);

    Rng rng(606, 1);
    std::vector<double> u1(10000), u2(10000);
    for (auto& x : u1) x = rng.uniform01();
    for (auto& x : u2) x = 0.5 + rng.uniform01();
    CHECK_FALSE(ks_two_sample(u1, u2, 0.01).pass);

    // calibration: same-law splits pass at the 1% level nearly always
    int passes = 0;
    for (int rep = 0; rep < 100; ++rep) {
        std::vector<double> x(4000), y(4000);
        for (auto& v : x) v = rng.uniform01();
        for (auto& v : y) v = rng.uniform01();
        passes += ks_two_sample(x, y, 0.01).pass ? 1 : 0;
    }
    CHECK(passes >= 98);
    CHECK_THROWS_AS(ks_two_sample({}, {1.0}, 0.01), DomainError);
}

TEST_CASE("loglog slope") {
    std::vector<double> x{10, 100, 1000, 10000}, y;
    for (double v : x) y.push_back(3.0 * std::pow(v, 1.0 / 3.0));
    CHECK(loglog_slope(x, y) == Catch::Approx(1.0 / 3.0).epsilon(1e-12));
}
