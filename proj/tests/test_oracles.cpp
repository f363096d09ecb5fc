#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "povmrand/certify.hpp"
#include "povmrand/eat.hpp"
#include "povmrand/qsim.hpp"

using namespace povmrand;

namespace {

// Local deterministic maximum of a two-setting binary Bell functional by enumeration.
double bruteForceLocalChsh(const Functional& f) {
    double best = -1e300;
    for (int s = 0; s < 16; ++s) {
        BellBehavior p(chshScenario());
        for (int x = 0; x < 2; ++x)
            for (int y = 0; y < 2; ++y) {
                const int a = s >> x & 1;
                const int b = s >> (2 + y) & 1;
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j) p.at(i, j, x, y) = i == a && j == b ? 1 : 0;
            }
        best = std::max(best, f.evaluate(p));
    }
    return best;
}

// The epsilon terms evaluated in extended precision, rearranged.
long double refEpsV(long double beta, long double gamma, long double D) {
    const long double root = sqrtl(D * D / gamma + 2.0L);
    const long double s = logl(129.0L) / logl(2.0L) + root;
    return 0.5L * beta * logl(2.0L) * s * s;
}
long double refEpsK(long double beta, long double D) {
    const long double l2 = logl(2.0L);
    const long double inner = 2.0L + l2 * (2.0L + D);
    const long double cube = inner * inner * inner;
    return expl(l2 * beta * (3.0L + D)) * beta * beta * cube / (6.0L * l2 * powl(1.0L - beta, 3.0L));
}
long double refEpsOmega(long double beta, long double pOmega, long double epsS) {
    return (1.0L - (logl(pOmega) + logl(epsS)) / logl(2.0L)) / beta;
}

}  // namespace

TEST_CASE("CHSH local bound by enumeration") {
    const Certificate c = chshCertificate();
    CHECK(bruteForceLocalChsh(c.functional) == doctest::Approx(2.0).epsilon(1e-12));
    REQUIRE(c.localBound.has_value());
    CHECK(*c.localBound == doctest::Approx(2.0));
    const BoundResult r = maximize(buildBellMomentProblem(chshScenario(), LevelSpec::parse("1+AB"), EventForm::fromBell(c.functional)));
    CHECK(r.value >= bruteForceLocalChsh(c.functional));
}

TEST_CASE("epsilon functions against an extended-precision re-implementation") {
    for (double beta : {1e-9, 2e-8, 1e-6, 1e-3, 0.1, 0.4})
        for (double D : {1.0, 50.0, 121.01}) {
            CHECK(epsilonV(beta, 4e-4, D) == doctest::Approx(static_cast<double>(refEpsV(beta, 4e-4L, D))).epsilon(1e-12));
            CHECK(epsilonK(beta, D) == doctest::Approx(static_cast<double>(refEpsK(beta, D))).epsilon(1e-12));
        }
    CHECK(epsilonOmega(2e-8, 0.997, 3.09e-12) ==
          doctest::Approx(static_cast<double>(refEpsOmega(2e-8L, 0.997L, 3.09e-12L))).epsilon(1e-12));
    CHECK(epsilonV(2e-8, 4e-4, 121.01) == doctest::Approx(0.2542).epsilon(1e-3));
    CHECK(epsilonOmega(2e-8, 0.997, 3.09e-12) == doctest::Approx(1.962e9).epsilon(1e-3));
    const double ek = epsilonK(2e-8, 121.01);
    CHECK(ek > 1e-11);
    CHECK(ek < 1e-9);
    double prev = 0;
    for (double beta = 0.01; beta < 0.5; beta += 0.01) {
        const double v = epsilonK(beta, 121.01);
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("see-saw rediscovers the ideal strategies") {
    SeesawOptions o;
    o.restarts = 6;
    const auto chsh = seesawBell(chshScenario(), chshCertificate().functional, 2, o);
    CHECK(chsh.value >= 2 * std::sqrt(2.0) - 1e-6);
    CHECK_NOTHROW(chsh.strategy.behavior().validate());
    CHECK(chshCertificate().evaluate(chsh.strategy.behavior()) == doctest::Approx(chsh.value).epsilon(1e-10));
    for (std::size_t i = 1; i < chsh.history.size(); ++i) CHECK(chsh.history[i] >= chsh.history[i - 1] - 1e-12);

    const Certificate el = elegantCertificate(1);
    const auto e = seesawBell(elegantScenario(), el.functional, 2, o);
    CHECK(e.value >= 4 * std::sqrt(3.0) - 1e-6);

    const Certificate q = reducedQracCertificate(1);
    const auto pm = seesawPm(reducedQracScenario(), q.functional, o);
    CHECK(pm.value >= (1 + std::sqrt(3.0) / 3) / 2 - 1e-6);
}

TEST_CASE("2^2 -> 1 random access code is sandwiched") {
    const Certificate c = racCertificate(2, 2);
    SeesawOptions o;
    o.restarts = 6;
    const auto lower = seesawPm(racScenario(2, 2), c.functional, o);
    const BoundResult upper = maximize(buildPmMomentProblem(racScenario(2, 2), 2, LevelSpec::parse("2"), EventForm::fromPm(c.functional)));
    REQUIRE(upper.optimal());
    const double ideal = (1 + 1 / std::sqrt(2.0)) / 2;
    CHECK(lower.value == doctest::Approx(ideal).epsilon(1e-6));
    CHECK(upper.value >= lower.value - 1e-6);
    CHECK(upper.value == doctest::Approx(ideal).epsilon(2e-4));
}

TEST_CASE("iterative refinement equals exhaustive enumeration on CHSH") {
    const Certificate c = chshCertificate();
    const BellScenario s = chshScenario();
    const auto strategies = enumerateGuessStrategies(s, 0);
    REQUIRE(strategies.size() == 16);
    const std::vector<LevelSpec> ladder{LevelSpec::parse("1"), LevelSpec::parse("1+AB")};
    const std::vector<DataSpec> data{{"chsh", c.functional, Sense::Equal, 2.6}};
    const BoundOracle oracle = [&](int i, int rung) {
        const auto p = buildBellMomentProblem(s, ladder[static_cast<std::size_t>(rung)],
                                              bellGuessForm(strategies[static_cast<std::size_t>(i)], 0), data);
        const BoundResult r = maximize(p);
        if (!r.optimal()) throw std::runtime_error("solve failed");
        return r.value;
    };
    const RefinementResult it = iterativeRefinement(16, 2, oracle);
    const RefinementResult ex = exhaustiveMaximum(16, 2, oracle);
    CHECK(it.value == doctest::Approx(ex.value).epsilon(1e-9));
    const auto fullLevel = std::count(it.rung.begin(), it.rung.end(), 2);
    CHECK(fullLevel < ex.solves);
    const RefinementResult par = iterativeRefinement(16, 2, oracle, 4);
    CHECK(par.value == it.value);
    CHECK(par.best == it.best);
}
