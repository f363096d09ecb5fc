#include <doctest.h>

#include <cmath>

#include "povmrand/certify.hpp"

using namespace povmrand;

TEST_CASE("min-entropy") {
    CHECK(minEntropy(0.4325) == doctest::Approx(1.2093).epsilon(1e-4));
    CHECK(minEntropy(1.0) == 0.0);
    CHECK_THROWS_AS(minEntropy(0.0), InputError);
    CHECK_THROWS_AS(minEntropy(1.5), InputError);
}

TEST_CASE("guess strategy counts") {
    CHECK(enumerateGuessStrategies(elegantScenario(), 3).size() == 4096);
    CHECK(enumerateGuessStrategies(reducedQracScenario(), 3).size() == 256);
    CHECK(enumerateGuessStrategies(chshScenario(), 0).size() == 16);
    const auto t = enumerateTuples({2, 3});
    REQUIRE(t.size() == 6);
    CHECK(t[5] == std::vector<int>{1, 2});
}

TEST_CASE("convex envelope") {
    const std::vector<std::pair<double, double>> pts{{0, 2}, {1, 0.5}, {2, 1.5}, {3, 0.2}, {4, 0.1}};
    const ConvexEnvelope env(pts);
    for (const auto& [q, v] : pts) CHECK(env(q) <= v + 1e-12);
    const auto& vs = env.vertices();
    for (std::size_t i = 1; i + 1 < vs.size(); ++i) {
        const double left = (vs[i].second - vs[i - 1].second) / (vs[i].first - vs[i - 1].first);
        const double right = (vs[i + 1].second - vs[i].second) / (vs[i + 1].first - vs[i].first);
        CHECK(left <= right);
    }
    CHECK(env(1.5) == doctest::Approx(0.5 - 0.5 * (0.5 - 0.2) / 2));
    CHECK_THROWS_AS(env(5), InputError);
    CHECK_THROWS_AS(ConvexEnvelope({{1, 1}}), InputError);
}

TEST_CASE("unconstrained guessing is trivial") {
    const GuessResult r = pguessQuantumLocal(chshScenario(), 0, LevelSpec::parse("1+AB"), {});
    CHECK(r.p == doctest::Approx(1).epsilon(1e-7));
    REQUIRE(r.dual.has_value());
    CHECK(r.dual->functional.terms.empty());
    CHECK(r.dual->functional.constant == doctest::Approx(1).epsilon(1e-6));
}

TEST_CASE("maximal CHSH violation certifies one bit") {
    const Certificate c = chshCertificate();
    const GuessResult r = pguessQuantumLocal(chshScenario(), 0, LevelSpec::parse("2"),
                                             {{"chsh", c.functional, Sense::Equal, 2 * std::sqrt(2.0) - 1e-9}});
    CHECK(r.p == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("inconsistent data is infeasible") {
    const Certificate c = chshCertificate();
    CHECK_THROWS_WITH_AS(pguessQuantumLocal(chshScenario(), 0, LevelSpec::parse("1+AB"), {{"chsh", c.functional, Sense::Equal, 3.5}}),
                         doctest::Contains("infeasible"), InputError);
}

TEST_CASE("classical curve on CHSH") {
    ClassicalSweepConfig cfg;
    cfg.ladder = {LevelSpec::parse("1"), LevelSpec::parse("1+AB")};
    cfg.xStar = 0;
    std::vector<CurveSample> seen;
    cfg.onSample = [&](const CurveSample& s) { seen.push_back(s); };
    const Certificate c = chshCertificate();
    const GuessingCurve curve = pguessClassical(c, certificateGrid(c, 5), cfg);
    CHECK(seen.size() == 5);
    REQUIRE(curve.samples.size() == 6);
    CHECK(curve.samples.front().p == 1.0);
    // Global randomness at maximal violation, level 1+AB: about 1.23 bits.
    CHECK(curve.envelope(c.quantumBound) == doctest::Approx(1.23).epsilon(0.01));
    for (const auto& s : curve.samples) CHECK(curve.envelope(s.q) <= minEntropy(s.p) + 1e-9);

    // Resuming from recorded samples gives the same curve without new solves.
    cfg.done = seen;
    seen.clear();
    const GuessingCurve again = pguessClassical(c, certificateGrid(c, 5), cfg);
    CHECK(seen.empty());
    CHECK(again.csv() == curve.csv());
}

TEST_CASE("grid outside the certificate range is rejected") {
    ClassicalSweepConfig cfg;
    cfg.ladder = {LevelSpec::parse("1")};
    CHECK_THROWS_AS(pguessClassical(chshCertificate(), {3.0}, cfg), InputError);
}
