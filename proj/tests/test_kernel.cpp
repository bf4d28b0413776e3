#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>

#include "peelab/kernel.hpp"
#include "test_util.hpp"

using namespace peelab;

namespace {
bool exact_le(const ExactScalar& x, const ExactScalar& y) { return (y - x).sign() >= 0; }
} // namespace

TEST_CASE("kernel row pinned values") {
    const auto r2 = kernel_row(ModelId::TypeII, 2);
    REQUIRE(r2.entries.size() == 1);
    CHECK(r2.entries[0].event.tag == PeelTag::C);
    CHECK(r2.entries[0].prob == ExactScalar(1));

    const auto r3 = kernel_row(ModelId::TypeII, 3);
    REQUIRE(r3.entries.size() == 3);
    CHECK(r3.find({PeelTag::C}).prob == ExactScalar(Rat(5, 6)));
    CHECK(r3.find({PeelTag::L, 1}).prob == ExactScalar(Rat(1, 12)));
    CHECK(r3.find({PeelTag::R, 1}).prob == ExactScalar(Rat(1, 12)));

    // growth probability approaches 2/3 from above
    FastKernel fk(ModelId::TypeII);
    CHECK(fk.q_c(1000000) == Catch::Approx(2.0 / 3.0).margin(1e-5));
    CHECK(fk.q_c(10) > 2.0 / 3.0);
}

TEST_CASE("TypeI rows close exactly, k-range 0..p-1") {
    // the sqrt(3) parts cancel only if the boundary cases k = p-2, p-1
    // belong to the row; this is the arbiter for the k-range
    const auto r1 = kernel_row(ModelId::TypeI, 1);
    REQUIRE(r1.entries.size() == 3);
    CHECK(r1.find({PeelTag::C}).prob == ExactScalar(Rat(0), Rat(1, 2)));
    CHECK(r1.find({PeelTag::L, 0}).prob == ExactScalar(Rat(1, 2), Rat(-1, 4)));
    for (long p = 1; p <= 64; ++p) {
        const auto row = kernel_row(ModelId::TypeI, p); // row-sum check built in
        CHECK(row.entries.size() == static_cast<std::size_t>(2 * p + 1));
    }
}

TEST_CASE("quad rows: half-perimeter convention and pairwise equalities") {
    const auto r1 = kernel_row(ModelId::Quad, 1);
    CHECK(r1.find({PeelTag::C}).prob == ExactScalar(Rat(5, 9)));
    CHECK(r1.find({PeelTag::L, 0}).prob == ExactScalar(Rat(1, 9)));
    for (long m : {2L, 3L, 7L, 20L}) {
        const auto row = kernel_row(ModelId::Quad, m);
        for (long k = 0; k + 1 <= 2 * m - 1; k += 2) {
            CHECK(row.find({PeelTag::L, k}).prob == row.find({PeelTag::L, k + 1}).prob);
            CHECK(row.find({PeelTag::L, k}).prob == row.find({PeelTag::R, k}).prob);
        }
        // the three pair orientations carry identical weight
        CHECK(row.find({PeelTag::LPair, 1, 1}).prob == row.find({PeelTag::CPair, 1, 1}).prob);
    }
}

TEST_CASE("monotone h bounds on the row entries") {
    const WeightTable& wt = weight_table(ModelId::TypeII);
    for (long p = 2; p <= 200; p += (p < 20 ? 1 : 13)) {
        const ExactScalar qc_p = detail::q_c_exact(wt, p);
        CHECK(exact_le(nu_plus_exact(ModelId::TypeII), qc_p)); // q_-1^{(p)} >= q_-1
        for (long j = 1; j <= p - 2; ++j) {
            const ExactScalar qj_p = detail::q_k_exact(wt, p, j);
            const ExactScalar qj = wt.z(j + 1) * ExactScalar(pow_rat(Rat(9), -j));
            CAPTURE(p, j);
            CHECK(exact_le(qj_p, qj)); // q_j^{(p)} <= q_j
        }
    }
}

TEST_CASE("exact and double row entries agree to 1e-10") {
    for (ModelId m : {ModelId::TypeII, ModelId::TypeI}) {
        for (long p = min_boundary(m); p <= 200; p += (p < 10 ? 1 : 31)) {
            const auto row = kernel_row(m, p);
            for (const auto& e : row.entries) {
                const double exact = e.prob.to_double();
                CHECK(std::abs(e.prob_d - exact) <= 1e-10 * std::max(1e-30, exact));
            }
        }
    }
}

TEST_CASE("h-transform identity") {
    CHECK(h_transform_check(ModelId::TypeII, 3).checked == 2);
    // q_1^{(3)} = h(2)/h(3) q_1 = (2/3)(1/8) = 1/12
    const WeightTable& wt = weight_table(ModelId::TypeII);
    CHECK(wt.h_ratio(3, 1) == ExactScalar(Rat(2, 3)));
    CHECK(nu_minus_exact(ModelId::TypeII, 1) == ExactScalar(Rat(1, 4))); // 2 q_1
    // q_{-1}^{(2)} = (3/2)(2/3) = 1
    CHECK(wt.h_ratio(2, -1) * nu_plus_exact(ModelId::TypeII) == ExactScalar(1));
    CHECK(h_transform_check(ModelId::TypeII, 200).checked == 199);
    CHECK(h_transform_check(ModelId::TypeI, 200).checked == 201);
    CHECK_THROWS_AS(h_transform_check(ModelId::Quad, 5), DomainError);
}

TEST_CASE("sample_event follows the row order") {
    const auto r2 = kernel_row(ModelId::TypeII, 2);
    CHECK(sample_event(r2, 0.001).tag == PeelTag::C);
    CHECK(sample_event(r2, 0.999).tag == PeelTag::C);

    const auto r3 = kernel_row(ModelId::TypeII, 3);
    CHECK(sample_event(r3, 0.99) == PeelEvent{PeelTag::R, 1});
    CHECK(sample_event(r3, 0.5).tag == PeelTag::C);
    CHECK(sample_event(r3, 0.87) == PeelEvent{PeelTag::L, 1});
    CHECK_THROWS_AS(sample_event(r3, 0.0), DomainError);
    CHECK_THROWS_AS(sample_event(r3, 1.5), DomainError);
}

TEST_CASE("row sampling frequencies at p=3") {
    const auto r3 = kernel_row(ModelId::TypeII, 3);
    Rng rng(2024, 0);
    long c = 0;
    const long N = 1000000;
    for (long i = 0; i < N; ++i)
        if (sample_event(r3, rng.uniform01()).tag == PeelTag::C) ++c;
    const double phat = static_cast<double>(c) / N;
    const double p0 = 5.0 / 6.0;
    const double sigma = std::sqrt(p0 * (1 - p0) / N);
    CHECK(std::abs(phat - p0) <= 3 * sigma);
}

TEST_CASE("fast kernel matches exact rows in law") {
    // chi-square of sampled events against exact probabilities
    for (ModelId m : {ModelId::TypeII, ModelId::TypeI, ModelId::Quad}) {
        const long p = m == ModelId::Quad ? 4 : 7;
        const auto row = kernel_row(m, p);
        FastKernel fk(m);
        Rng rng(99, 7);
        const long N = 200000;
        std::map<std::string, long> hits;
        for (long i = 0; i < N; ++i) {
            const PeelEvent ev = m == ModelId::Quad ? fk.sample_quad(p, rng)
                                                    : fk.sample_tri(p, rng);
            hits[ev.str()]++;
        }
        double chi2 = 0;
        int dof = -1;
        for (const auto& e : row.entries) {
            const double expect = e.prob_d * N;
            if (expect < 5) continue;
            const double got = static_cast<double>(hits[e.event.str()]);
            chi2 += (got - expect) * (got - expect) / expect;
            ++dof;
        }
        CAPTURE(model_name(m), chi2, dof);
        CHECK(chi2 < testutil::chi2_quantile_95(std::max(dof, 1)) * 1.5);
    }
}

TEST_CASE("nu law: centering and tail constant") {
    for (ModelId m : {ModelId::TypeII, ModelId::TypeI, ModelId::Quad}) {
        const auto nm = nu_moments(m, 1e-8);
        CAPTURE(model_name(m), nm.mean, nm.tail_constant_ratio);
        CHECK(nm.mean_ok);
        CHECK(std::abs(nm.mean) <= 1e-8);
        CHECK(nm.tail_ok);
    }
    // total mass closes exactly: nu(1) + sum_k nu(-k) = 1 (k <= 400 window,
    // remainder bounded by the tail estimate)
    double mass = nu_plus_exact(ModelId::Quad).to_double();
    for (long k = 0; k <= 400; ++k) mass += nu_minus_exact(ModelId::Quad, k).to_double();
    CHECK(mass == Catch::Approx(1.0).margin(2e-4));
    CHECK_THROWS_AS(nu_moments(ModelId::TypeII, 0.0), DomainError);
}

TEST_CASE("quad row materialization is guarded") {
    CHECK_THROWS_AS(kernel_row(ModelId::Quad, 4096), ResourceError);
}
