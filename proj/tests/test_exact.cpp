#include <catch2/catch_amalgamated.hpp>

#include "peelab/exact.hpp"
#include "peelab/rng.hpp"

using namespace peelab;

TEST_CASE("rational helpers") {
    CHECK(factorial(0) == 1);
    CHECK(factorial(5) == 120);
    CHECK(double_factorial(-1) == 1);
    CHECK(double_factorial(0) == 1);
    CHECK(double_factorial(7) == 105);
    CHECK(double_factorial(8) == 384);
    CHECK(pow_rat(Rat(9, 4), 3) == Rat(729, 64));
    CHECK(pow_rat(Rat(9, 4), -2) == Rat(16, 81));
}

TEST_CASE("ExactScalar ring operations in Q[sqrt3]") {
    const ExactScalar s3 = ExactScalar::sqrt3();
    CHECK(s3 * s3 == ExactScalar(3));
    const ExactScalar x(Rat(1, 2), Rat(-1, 4)); // (2 - sqrt3)/4
    const ExactScalar y(Rat(0), Rat(3, 4));     // 3 sqrt3 / 4
    CHECK((x + y) == ExactScalar(Rat(1, 2), Rat(1, 2)));
    CHECK((x * y).a == Rat(-9, 16));
    CHECK((x * y).b == Rat(3, 8));

    // division undoes multiplication for random ring elements
    Rng rng(17, 0);
    auto rnd = [&rng] {
        return make_rat(static_cast<long>(rng.below(41)) - 20,
                        1 + static_cast<long>(rng.below(7)));
    };
    for (int i = 0; i < 200; ++i) {
        const ExactScalar u(rnd(), rnd());
        const ExactScalar v(rnd(), rnd());
        if (v.is_zero()) continue;
        CHECK((u / v) * v == u);
    }
}

TEST_CASE("ExactScalar sign and value") {
    const ExactScalar x(Rat(2), Rat(-1)); // 2 - sqrt3 > 0
    CHECK(x.sign() == 1);
    const ExactScalar y(Rat(1), Rat(-1)); // 1 - sqrt3 < 0
    CHECK(y.sign() == -1);
    const ExactScalar z(Rat(-3), Rat(2)); // 2 sqrt3 - 3 > 0
    CHECK(z.sign() == 1);
    CHECK(ExactScalar(Rat(0)).sign() == 0);
    CHECK(x.to_double() == Catch::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-15));
}

TEST_CASE("radical expressions") {
    using RE = RadicalExpr;
    const RE p = RE::monomial(1, Rat(2, 3), Rat(-2, 3)); // (2/3)^{2/3}
    const RE h = RE::monomial(1, Rat(-2, 3), Rat(-1, 3));
    CHECK(p / (h * h) == RE(4));
    CHECK(p.value() == Catch::Approx(std::pow(2.0 / 3.0, 2.0 / 3.0)).epsilon(1e-14));

    const RE sum = RE(1) + RE::monomial(Rat(1, 2), 0, Rat(-1, 2));
    CHECK(sum.value() == Catch::Approx(1.0 + 0.5 / std::sqrt(3.0)).epsilon(1e-14));
    CHECK(sum != RE(1));
    CHECK(sum - RE(1) == RE::monomial(Rat(1, 2), 0, Rat(-1, 2)));

    // rational powers of 2^x 3^y monomials
    const RE twothirds = RE(Rat(2, 3));
    CHECK(twothirds.pow(Rat(2, 3)) == p);
    long e2 = 0, e3 = 0;
    CHECK(factor_out_23(Rat(16, 27), e2, e3));
    CHECK(e2 == 4);
    CHECK(e3 == -3);
    CHECK_FALSE(factor_out_23(Rat(5, 3), e2, e3));
}
