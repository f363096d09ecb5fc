#include <doctest.h>

#include <cmath>

#include "povmrand/qsim.hpp"
#include "povmrand/scenario.hpp"

using namespace povmrand;

namespace {
const double kSqrt3 = std::sqrt(3.0);
}

TEST_CASE("behaviors validate and mix") {
    const BellBehavior u = BellBehavior::uniform(chshScenario());
    CHECK_NOTHROW(u.validate());
    CHECK(u(0, 1, 1, 0) == doctest::Approx(0.25));
    BellBehavior bad = u;
    bad.at(0, 0, 0, 0) = 0.5;
    CHECK_THROWS_AS(bad.validate(), InputError);
    const PmBehavior pu = PmBehavior::uniform(reducedQracScenario());
    CHECK(pu(0, 2, 3) == doctest::Approx(0.25));
    CHECK(pu(1, 2, 0) == doctest::Approx(0.5));
}

TEST_CASE("certificate values on reference behaviors") {
    const BellBehavior ideal = idealElegantStrategy().behavior();
    CHECK(correlator(ideal, 0, 0) == doctest::Approx(1 / kSqrt3).epsilon(1e-12));
    CHECK(elegantCertificate(0).evaluate(ideal) == doctest::Approx(4 * kSqrt3).epsilon(1e-12));
    CHECK(elegantCertificate(1).evaluate(BellBehavior::uniform(elegantScenario())) == doctest::Approx(-0.5));
    // The white-noise metadata follows the published W = 0.5 - k/4, while the uniform behavior
    // puts 1/4 on each of the four penalty events.
    CHECK(reducedQracCertificate(1).whiteNoise == doctest::Approx(0.25));
    CHECK(reducedQracCertificate(1).evaluate(PmBehavior::uniform(reducedQracScenario())) == doctest::Approx(-0.5));
    CHECK(reducedQracCertificate(0).evaluate(idealQracStrategy().behavior()) ==
          doctest::Approx((1 + kSqrt3 / 3) / 2).epsilon(1e-12));
}

TEST_CASE("fixtures reproduce the published derived values") {
    const Fixture el = loadFixture("elegant-2019");
    CHECK(el.statistic("<A3B3>").measured.value == doctest::Approx(-0.621));
    CHECK(el.certificateValue(elegantCertificate(2)) == doctest::Approx(6.8907).epsilon(3e-5));
    CHECK(relativeValue(el.certificateValue(elegantCertificate(1)), elegantCertificate(1)) ==
          doctest::Approx(0.9961565).epsilon(1e-7));
    const Fixture pm = loadFixture("pnm-2019");
    CHECK(pm.certificateValue(reducedQracCertificate(1)) == doctest::Approx(0.786488 - 0.00676251).epsilon(1e-9));
    CHECK(relativeValue(pm.certificateValue(reducedQracCertificate(1)), reducedQracCertificate(1)) ==
          doctest::Approx(0.9833858).epsilon(1e-7));
    CHECK_THROWS_AS(loadFixture("nope"), InputError);
}

TEST_CASE("tetrahedral POVM") {
    const Measurement m = tetrahedralPovm();
    CMat sum = CMat::Zero(2, 2);
    for (const auto& e : m.effects) {
        sum += e;
        CHECK(e.trace().real() == doctest::Approx(0.5).epsilon(1e-14));
        CHECK(blochVector(2 * e).norm() == doctest::Approx(1).epsilon(1e-12));
    }
    CHECK((sum - CMat::Identity(2, 2)).norm() < 1e-12);
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            CHECK(blochVector(2 * m.effects[i]).dot(blochVector(2 * m.effects[j])) == doctest::Approx(-1.0 / 3).epsilon(1e-12));
    CVec zero = CVec::Zero(2);
    zero(0) = 1;
    CHECK(born(QState::pure(zero), m.effects[0]) == doctest::Approx((3 - kSqrt3) / 12).epsilon(1e-12));
}

TEST_CASE("ideal prepare-and-measure strategy") {
    const PmBehavior b = idealQracStrategy().behavior();
    for (int x = 0; x < 4; ++x) {
        int third = 0;
        for (int o = 0; o < 4; ++o) {
            const double p = b(o, x, 3);
            if (p > 1e-9) {
                CHECK(p == doctest::Approx(1.0 / 3).epsilon(1e-12));
                ++third;
            }
        }
        CHECK(third == 3);
    }
}
