#include <doctest.h>

#include "povmrand/moment_problem.hpp"
#include "povmrand/words.hpp"

using namespace povmrand;

TEST_CASE("monomial inventories") {
    CHECK(generateMonomials(chshScenario(), LevelSpec::parse("1")).size() == 5);
    CHECK(generateMonomials(chshScenario(), LevelSpec::parse("1+AB")).size() == 9);
    CHECK(generateMonomials(elegantScenario().withEve({4}), LevelSpec::parse("1")).size() == 14);
}

TEST_CASE("level spec parsing") {
    const LevelSpec s = LevelSpec::parse("2+AAE+BBE+ABE");
    CHECK(s.level == 2);
    CHECK(s.blocks.size() == 3);
    CHECK(s.str() == "2+AAE+BBE+ABE");
    CHECK_THROWS_AS(LevelSpec::parse("x"), InputError);
    CHECK_THROWS_AS(LevelSpec::parse("1+AQ"), InputError);
}

TEST_CASE("projector algebra canonicalization") {
    const Letter a0 = makeLetter(kA, 0, 0);
    const Letter a1 = makeLetter(kA, 0, 1);
    const Letter b0 = makeLetter(kB, 0, 0);
    // Orthogonal outcomes of one setting annihilate each other.
    CHECK_FALSE(canonicalize(Word{a0, a1}).has_value());
    // Idempotence and commutation across parties.
    const auto w = canonicalize(Word{b0, a0, a0});
    REQUIRE(w.has_value());
    CHECK(*w == Word{a0, b0});
    CHECK(adjoint(Word{a0, makeLetter(kA, 1, 0)}) == Word{makeLetter(kA, 1, 0), a0});
}

TEST_CASE("moment problem serialization is stable") {
    const Certificate c = chshCertificate();
    const auto a = buildBellMomentProblem(chshScenario(), LevelSpec::parse("1+AB"), EventForm::fromBell(c.functional));
    const auto b = buildBellMomentProblem(chshScenario(), LevelSpec::parse("1+AB"), EventForm::fromBell(c.functional));
    CHECK(a.serialize() == b.serialize());
    CHECK(a.words.size() == 9);
}
