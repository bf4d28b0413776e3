#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "peelab/chains.hpp"
#include "peelab/limits.hpp"
#include "test_util.hpp"

using namespace peelab;

TEST_CASE("pv chain: first step is deterministic") {
    for (int i = 0; i < 20; ++i) {
        PvChain pv(ModelId::TypeII, 99, i);
        pv.step();
        CHECK(pv.perimeter() == 3);
        CHECK(pv.inner_vertices() == 0);
        CHECK(pv.total_vertices() == 3);
    }
}

TEST_CASE("vertex conservation along pv paths") {
    // V + P - 2 - #C = sum of sampled hole sizes, pathwise (TypeII)
    PvChain pv(ModelId::TypeII, 123, 0);
    for (long i = 0; i < 20000; ++i) {
        pv.step();
        REQUIRE(pv.inner_vertices() + pv.perimeter() - 2 - pv.c_events() ==
                pv.hole_vertex_sum());
        REQUIRE(pv.inner_vertices() >= 0);
    }
}

TEST_CASE("quad pv chain stays on half-perimeters") {
    PvChain pv(ModelId::Quad, 7, 0);
    for (long i = 0; i < 20000; ++i) {
        pv.step();
        REQUIRE(pv.perimeter() >= 1);
        REQUIRE(pv.inner_vertices() >= 0);
    }
    CHECK(pv.boundary_edges() == 2 * pv.perimeter());
}

TEST_CASE("layer kernel Q re-partitions the one-step law") {
    // the five Q lines must partition each L/R event range and the exact
    // masses must close to the kernel row sum
    const WeightTable& wt = weight_table(ModelId::TypeII);
    for (long p = 2; p <= 100; p += (p < 12 ? 1 : 17)) {
        for (long ell = 0; ell <= p - 1; ell += (p < 12 ? 1 : 7)) {
            ExactScalar sum = detail::q_c_exact(wt, p); // (p+1, ell+1, h)
            for (long k = 1; k <= p - 2; ++k) {
                const ExactScalar q = detail::q_k_exact(wt, p, k);
                // L side: exactly one of lines 2 / 4
                const bool l2 = 1 <= k && k <= ell - 1;
                const bool l4 = ell <= k;
                REQUIRE((l2 ? 1 : 0) + (l4 ? 1 : 0) == 1);
                // R side: exactly one of lines 3 / 5
                const bool l3 = k <= p - ell - 1;
                const bool l5 = p - ell <= k;
                REQUIRE((l3 ? 1 : 0) + (l5 ? 1 : 0) == 1);
                sum += q * ExactScalar(2);
            }
            REQUIRE(sum == ExactScalar(1));
        }
    }
}

TEST_CASE("dual kernel Q* re-partitions the one-step law") {
    for (long p = 2; p <= 100; p += (p < 12 ? 1 : 17)) {
        for (long ell = 0; ell <= p - 1; ell += (p < 12 ? 1 : 7)) {
            // C: line 1 or 2 by ell
            const bool c1 = ell <= p - 2, c2 = ell == p - 1;
            REQUIRE((c1 ? 1 : 0) + (c2 ? 1 : 0) == 1);
            for (long k = 1; k <= p - 2; ++k) {
                const bool l3 = k <= ell;              // (p-k, ell-k+1, h)
                const bool l5 = ell + 1 <= k;          // (p-k, 1, h)
                REQUIRE((l3 ? 1 : 0) + (l5 ? 1 : 0) == 1);
                const bool l4 = k <= p - ell - 2;      // (p-k, ell+1, h)
                const bool l6 = p - ell - 1 <= k;      // (p-k, 0, h+1)
                REQUIRE((l4 ? 1 : 0) + (l6 ? 1 : 0) == 1);
            }
        }
    }
}

TEST_CASE("layer chain invariants along a run") {
    LayerChain chain(2048, 0);
    long prev_h = 0, prev_a = 0, prev_p = 2;
    for (long i = 0; i < 50000; ++i) {
        const bool completed = chain.step_layer();
        REQUIRE(chain.g() >= 0);
        REQUIRE(chain.g() <= chain.perimeter() - 1);
        REQUIRE(chain.height() - prev_h >= 0);
        REQUIRE(chain.height() - prev_h <= 1);
        if (completed) REQUIRE(chain.g() == 0); // sigma_r states
        const long a = chain.layer_edges();
        REQUIRE(a >= prev_a); // A nondecreasing
        const long dp = chain.perimeter() - prev_p;
        REQUIRE(a - prev_a <= std::max<long>(0, -dp) + 1); // dA <= (dP)_- + 1
        prev_h = chain.height();
        prev_a = a;
        prev_p = chain.perimeter();
    }
    CHECK(chain.height() > 5);
}

TEST_CASE("layer rate A_n/n approaches 1/3 (reduced)") {
    double s = 0;
    const long reps = 8, steps = 300000;
    for (long r = 0; r < reps; ++r) {
        LayerChain chain(31337, r, false);
        for (long i = 0; i < steps; ++i) chain.step_layer();
        s += static_cast<double>(chain.layer_edges()) / steps;
    }
    CHECK(std::abs(s / reps - 1.0 / 3.0) < 0.03);
}

TEST_CASE("hull series: boundaries grow like r^2 with the right constant") {
    // E|dB*_r| / r^2 -> p/h^2 * E[L_1] = 4 * 3/8 = 3/2, approached from
    // above with a finite-size correction of order 1/r (empirically about
    // 3/r); the test pins the limit constant and the correction envelope
    const long reps = 400, r = 40;
    double acc = 0;
    for (long i = 0; i < reps; ++i) {
        const auto recs = hull_series(r, 5150, i, false);
        acc += static_cast<double>(recs.back().boundary) / (r * r);
    }
    const double mean = acc / reps;
    const double ratio = mean / 1.5;
    CHECK(ratio >= 1.0 - 0.04);
    CHECK(ratio <= 1.0 + 5.0 / static_cast<double>(r));
}

TEST_CASE("dual chain invariants and H*/H ratio") {
    DualLayerChain chain(606, 0);
    long prev_h = 0;
    for (long i = 0; i < 50000; ++i) {
        chain.step_dual();
        REQUIRE(chain.g_star() >= 0);
        REQUIRE(chain.g_star() <= chain.perimeter() - 1);
        REQUIRE(chain.h_star() - prev_h >= 0);
        REQUIRE(chain.h_star() - prev_h <= 1);
        prev_h = chain.h_star();
    }

    // median H*/H over independent replicas at matched n approaches
    // h*/h = 4 within 10%
    const long reps = 30, n = 1000000;
    std::vector<double> hs, hp;
    for (long i = 0; i < reps; ++i) {
        DualLayerChain d(44, i, false);
        for (long s = 0; s < n; ++s) d.step_dual();
        hs.push_back(static_cast<double>(d.h_star()));
        LayerChain l(45, i, false);
        for (long s = 0; s < n; ++s) l.step_layer();
        hp.push_back(static_cast<double>(l.height()));
    }
    const double ratio = quantile_of(hs, 0.5) / quantile_of(hp, 0.5);
    CAPTURE(ratio);
    CHECK(ratio > 4.0 * 0.9);
    CHECK(ratio < 4.0 * 1.1);
}

TEST_CASE("fpp clocks") {
    // first clock is Exp(2) from the trivial start (2 boundary edges)
    double s = 0, s2 = 0;
    const long N = 100000;
    for (long i = 0; i < N; ++i) {
        FppChain f(ModelId::TypeII, 11, i, false);
        f.step_fpp();
        s += f.tau();
        s2 += f.tau() * f.tau();
    }
    const double mean = s / N, se = std::sqrt((s2 / N - mean * mean) / (N - 1));
    CHECK(std::abs(mean - 0.5) <= 3 * se);

    // increments times the pre-jump boundary size are Exp(1)
    FppChain f(ModelId::TypeII, 12, 0, false);
    std::vector<double> scaled;
    double prev_tau = 0;
    for (long i = 0; i < 20000; ++i) {
        const double rate = static_cast<double>(f.boundary_edges());
        f.step_fpp();
        scaled.push_back((f.tau() - prev_tau) * rate);
        prev_tau = f.tau();
    }
    const double d =
        testutil::ks_one_sample(scaled, [](double x) { return 1.0 - std::exp(-x); });
    CHECK(d < 1.63 / std::sqrt(20000.0)); // 1% one-sample band
}

TEST_CASE("pv and fpp have indistinguishable (P, V) marginals") {
    const long reps = 5000, n = 5000;
    std::vector<double> pa(reps), pb(reps), va(reps), vb(reps);
    for (long i = 0; i < reps; ++i) {
        PvChain a(ModelId::TypeII, 21, i);
        for (long s = 0; s < n; ++s) a.step();
        pa[i] = static_cast<double>(a.perimeter());
        va[i] = static_cast<double>(a.inner_vertices());
        FppChain b(ModelId::TypeII, 22, i);
        for (long s = 0; s < n; ++s) b.step_fpp();
        pb[i] = static_cast<double>(b.perimeter());
        vb[i] = static_cast<double>(b.inner_vertices());
    }
    CHECK(ks_two_sample(pa, pb, 0.01).pass);
    CHECK(ks_two_sample(va, vb, 0.01).pass);
}

TEST_CASE("self-similarity of the perimeter law, exponent 2/3") {
    const long reps = 300;
    std::vector<double> a(reps), b(reps);
    for (long i = 0; i < reps; ++i) {
        PvChain x(ModelId::TypeII, 71, i, false);
        for (long s = 0; s < 25000; ++s) x.step();
        a[i] = x.perimeter() / std::pow(25000.0, 2.0 / 3.0);
        PvChain y(ModelId::TypeII, 72, i, false);
        for (long s = 0; s < 100000; ++s) y.step();
        b[i] = y.perimeter() / std::pow(100000.0, 2.0 / 3.0);
    }
    CHECK(ks_two_sample(a, b, 0.01).pass);
}

TEST_CASE("transience proxy: windowed minima grow") {
    // averaged over replicas, the minimum of P over [n, 2n] increases with
    // the window start (P_n -> infinity)
    double m1 = 0, m2 = 0, m3 = 0;
    const long reps = 20;
    for (long r = 0; r < reps; ++r) {
        PvChain pv(ModelId::TypeII, 2077, r, false);
        long a = 1 << 30, b = 1 << 30, c = 1 << 30;
        for (long i = 1; i <= 160000; ++i) {
            pv.step();
            if (i > 10000 && i <= 20000) a = std::min(a, pv.perimeter());
            if (i > 40000 && i <= 80000) b = std::min(b, pv.perimeter());
            if (i > 80000 && i <= 160000) c = std::min(c, pv.perimeter());
        }
        m1 += static_cast<double>(a);
        m2 += static_cast<double>(b);
        m3 += static_cast<double>(c);
    }
    CHECK(m1 < m2);
    CHECK(m2 < m3);
    CHECK(m1 / reps > 2.0);
}

TEST_CASE("traces carry the documented schemas") {
    const Trace t1 = run_pv(ModelId::TypeII, 100, 5);
    CHECK(std::string(t1.header()) == "n,P,V");
    CHECK(t1.rows.size() == 100);

    const Trace t2 = run_layers(100, 5);
    CHECK(std::string(t2.header()) == "n,P,V,H,A,U,G");
    const Trace t3 = run_fpp(ModelId::Quad, 64, 5);
    CHECK(std::string(t3.header()) == "k,tau,P,V");
    CHECK(t3.rows.back().tau > 0);

    const Trace t4 = run_dual_layers(100, 5, 0, 0);
    CHECK(t4.rows.size() == 1); // record_every = 0 keeps the final row

    std::ostringstream os;
    t1.write_csv(os);
    CHECK(os.str().substr(0, 6) == "n,P,V\n");
    CHECK_THROWS_AS(run_pv(ModelId::TypeII, 0, 1), DomainError);
}

TEST_CASE("identical seeds reproduce identical traces") {
    const Trace a = run_fpp(ModelId::TypeII, 500, 42, 3);
    const Trace b = run_fpp(ModelId::TypeII, 500, 42, 3);
    REQUIRE(a.rows.size() == b.rows.size());
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        CHECK(a.rows[i].P == b.rows[i].P);
        CHECK(a.rows[i].tau == b.rows[i].tau);
    }
    const Trace c = run_fpp(ModelId::TypeII, 500, 43, 3);
    bool differ = false;
    for (std::size_t i = 0; i < c.rows.size(); ++i) differ = differ || c.rows[i].P != a.rows[i].P;
    CHECK(differ);
}
