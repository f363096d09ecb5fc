#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "povmrand/schur.hpp"
#include "povmrand/sdp.hpp"

using namespace povmrand;

namespace {

// minimize x subject to x - 1 >= 0
SdpInstance scalarToy() {
    SdpInstance s;
    s.blockSizes = {1};
    s.c = {1};
    s.F = {{{0, 0, 0, -1}}, {{0, 0, 0, 1}}};
    return s;
}

// minimize x subject to [[x, 1], [1, x]] >= 0
SdpInstance matrixToy() {
    SdpInstance s;
    s.blockSizes = {2};
    s.c = {1};
    s.F = {{{0, 0, 1, 1}}, {{0, 0, 0, 1}, {0, 1, 1, 1}}};
    return s;
}

int entryLines(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    int n = 0;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::vector<std::string> tok;
        for (std::string t; ls >> t;) tok.push_back(t);
        n += tok.size() == 5;
    }
    return n;
}

}  // namespace

TEST_CASE("analytic toy problems") {
    for (const auto& inst : {scalarToy(), matrixToy()}) {
        const SdpSolution s = solveSdp(inst);
        REQUIRE(s.optimal());
        CHECK(s.x[0] == doctest::Approx(1).epsilon(1e-8));
        CHECK(s.primalObjective == doctest::Approx(1).epsilon(1e-8));
        CHECK(s.dualObjective == doctest::Approx(1).epsilon(1e-8));
    }
}

TEST_CASE("infeasible problem is reported") {
    // x >= 1 and -x >= 0
    SdpInstance s;
    s.blockSizes = {-2};
    s.c = {1};
    s.F = {{{0, 0, 0, -1}}, {{0, 0, 0, 1}, {0, 1, 1, -1}}};
    const SdpSolution r = solveSdp(s);
    CHECK(r.status == SdpStatus::Infeasible);
}

TEST_CASE("interchange format") {
    const SdpInstance toy = scalarToy();
    const std::string text = exportInterchange(toy);
    CHECK(entryLines(text) == 2);
    CHECK(exportInterchange(importInterchange(text)) == text);
    CHECK(importInterchange(text) == toy);

    SdpInstance diag = scalarToy();
    diag.blockSizes = {2, -3};
    diag.F[1].push_back({1, 2, 2, 1});
    const std::string dt = exportInterchange(diag);
    CHECK(dt.find("-3") != std::string::npos);
    CHECK(exportInterchange(importInterchange(dt)) == dt);

    try {
        importInterchange("1\n1\n1\n1.0\n0 1 1 1 oops\n");
        FAIL("malformed line accepted");
    } catch (const InputError& e) {
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
}

TEST_CASE("CHSH level 1 compiles to one 5x5 block") {
    const Certificate c = chshCertificate();
    const MomentProblem p = buildBellMomentProblem(chshScenario(), LevelSpec::parse("1"), EventForm::fromBell(c.functional));
    const CompiledProblem cp = compile(p);
    REQUIRE(cp.sdp.blockSizes.size() == 1);
    CHECK(cp.sdp.blockSizes[0] == 5);
}

TEST_CASE("inequality constraints gain a diagonal slack block") {
    const Fixture fx = loadFixture("elegant-2019");
    const MomentProblem p = buildBellMomentProblem(elegantScenario(), LevelSpec::parse("1"),
                                                   EventForm::fromBell(elegantCertificate(0).functional),
                                                   nietoSillerasConstraints(fx, ConstraintMode::Inequality));
    CHECK(p.inequalityCount() == 16);
    const CompiledProblem cp = compile(p);
    REQUIRE(cp.dataBlock >= 0);
    CHECK(cp.sdp.blockSizes[static_cast<std::size_t>(cp.dataBlock)] == -16);
}

TEST_CASE("solver invariants on the CHSH instance") {
    const Certificate c = chshCertificate();
    const MomentProblem p = buildBellMomentProblem(chshScenario(), LevelSpec::parse("1+AB"), EventForm::fromBell(c.functional));
    const CompiledProblem cp = compile(p);
    SdpOptions serial;
    serial.parallelSchur = false;
    const SdpSolution a = solveSdp(cp.sdp);
    const SdpSolution b = solveSdp(cp.sdp, serial);
    REQUIRE(a.optimal());
    CHECK(a.x == b.x);
    CHECK(a.iterations == b.iterations);
    CHECK(cp.objectiveValue(a.dualObjective) == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-8));
    CHECK(a.S.minEigenvalue() >= -1e-8);
    CHECK(a.Z.minEigenvalue() >= -1e-8);
    CHECK(std::abs(a.relativeGap) <= 1e-8);
    CHECK(a.dualInfeasibility <= 1e-7);
    for (std::size_t i = 1; i < a.log.size(); ++i) CHECK(a.log[i].mu <= a.log[i - 1].mu);
    // Weak duality holds at every iterate up to the residual terms of infeasible iterates.
    for (const auto& r : a.log) {
        const double slack = 1e-10 + 10 * (r.primalInfeasibility + r.dualInfeasibility) * (1 + std::abs(r.primalObjective));
        CHECK(r.dualObjective <= r.primalObjective + slack);
    }

    const SdpInstance replay = importInterchange(exportInterchange(cp.sdp));
    const SdpSolution r = solveSdp(replay);
    CHECK(r.primalObjective == doctest::Approx(a.primalObjective).epsilon(1e-9));
}

TEST_CASE("empty-constraint problem solves to the unconstrained optimum") {
    const Certificate c = chshCertificate();
    const BoundResult r = maximize(buildBellMomentProblem(chshScenario(), LevelSpec::parse("1+AB"), EventForm::fromBell(c.functional)));
    CHECK(r.optimal());
    CHECK(r.value == doctest::Approx(2 * std::sqrt(2.0)).epsilon(1e-8));
}

TEST_CASE("Schur complement kernels agree") {
    const Certificate c = elegantCertificate(1);
    const MomentProblem p = buildBellMomentProblem(elegantScenario(), LevelSpec::parse("1+AB"), EventForm::fromBell(c.functional));
    const SdpInstance inst = compile(p).sdp;
    BlockMatrix B = BlockMatrix::identity(inst.blockSizes, 0.3);
    BlockMatrix Z = BlockMatrix::identity(inst.blockSizes, 1.7);
    B.addEntries(inst.F[1], 0.01);
    Z.addEntries(inst.F[2], -0.02);
    const Eigen::MatrixXd par = schurComplement(inst, B, Z, true);
    const Eigen::MatrixXd seq = schurComplement(inst, B, Z, false);
    const Eigen::MatrixXd ref = schurComplementSerial(inst, B, Z);
    CHECK((par - seq).cwiseAbs().maxCoeff() == 0.0);
    CHECK((par - ref).cwiseAbs().maxCoeff() <= 1e-12 * (1 + ref.cwiseAbs().maxCoeff()));
}
