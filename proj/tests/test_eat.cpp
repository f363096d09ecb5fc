#include <doctest.h>

#include <cmath>

#include "povmrand/eat.hpp"

using namespace povmrand;

TEST_CASE("consumption rate") {
    CHECK(consumptionRate(4e-4) == doctest::Approx(0.006692).epsilon(1e-6 / 0.006692));
    CHECK(binaryEntropy(0.5) == 1.0);
    CHECK_THROWS_AS(consumptionRate(0), InputError);
}

TEST_CASE("tangent line from a published slope and intercept") {
    const MinTradeoff f = MinTradeoff::fromLine(42.07, -40.797, 0.993);
    CHECK(f.D == doctest::Approx(121.01).epsilon(1e-3));
    const NetRate r = netRate(EatParams{}, f);
    CHECK(r.entropy.certified);
    CHECK(r.grossPerEvent == doctest::Approx(0.53).epsilon(0.02));
    CHECK(r.bitsPerSecond == doctest::Approx(1.32e6).epsilon(0.1));
    CHECK(r.ratio == doctest::Approx(0.0127).epsilon(0.15));
    CHECK(r.expanding);
}

TEST_CASE("computed curve gives the tangent") {
    const EntropyCurve curve = computedEntropyCurve();
    const MinTradeoff f = minTradeoffFromCurve(curve);
    CHECK(f.slope == doctest::Approx(42.07).epsilon(0.05));
    CHECK(f.D == doctest::Approx(121.01).epsilon(0.05));
    CHECK_THROWS_AS(curve(0.5), InputError);
}

TEST_CASE("invalid parameters") {
    EatParams p;
    p.beta = 0;
    CHECK_THROWS_AS(p.validate(), InputError);
    p = EatParams{};
    p.gamma = 1;
    CHECK_THROWS_AS(netRate(p, MinTradeoff::fromLine(42.07, -40.797)), InputError);
}

TEST_CASE("too much noise certifies nothing") {
    EatParams p;
    p.eta = 0.95;
    const NetRate r = netRate(p, MinTradeoff::fromLine(42.07, -40.797, 0.993));
    CHECK_FALSE(r.entropy.certified);
    CHECK(r.entropy.total == 0.0);
    CHECK_FALSE(r.expanding);
}

TEST_CASE("protocol table") {
    const auto rows = compareProtocols(EatParams{}, MinTradeoff::fromLine(42.07, -40.797, 0.993));
    const auto lit = publishedProtocolRows();
    REQUIRE(rows.size() == lit.size());
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
        CHECK(rows[i].label == lit[i].label);
        CHECK(rows[i].bitRate == lit[i].bitRate);
    }
    CHECK(rows.back().eventRateHz == 2.5e6);
    CHECK(rows.back().rawBitsPerEvent == doctest::Approx(1.14));
    CHECK(rows.back().bitRate == doctest::Approx(1.32e6).epsilon(0.1));
}
