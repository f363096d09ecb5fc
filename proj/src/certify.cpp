#include "povmrand/certify.hpp"

#include <cmath>

namespace povmrand {

double minEntropy(double p) {
    if (!(p > 0) || p > 1 + 1e-9) throw InputError("min-entropy needs a probability in (0, 1]");
    return -std::log2(std::min(p, 1.0));
}

Certificate certificateById(const std::string& id, double k) {
    if (id == "chsh") return chshCertificate();
    if (id == "elegant") return elegantCertificate(k);
    if (id == "reduced-qrac") return reducedQracCertificate(k);
    throw InputError("unknown certificate '" + id + "' (expected chsh, elegant or reduced-qrac)");
}

LevelSpec defaultBellQuantumSpec() { return LevelSpec::parse("2+ABE"); }
LevelSpec defaultPmQuantumSpec() { return LevelSpec::parse("2+AAE+BBE+ABE"); }
std::vector<LevelSpec> defaultBellClassicalLadder() {
    return {LevelSpec::parse("1"), LevelSpec::parse("1+AB"), LevelSpec::parse("2")};
}
std::vector<LevelSpec> defaultPmClassicalLadder() { return {LevelSpec::parse("1"), LevelSpec::parse("2")}; }

namespace {

GuessResult solveGuess(const MomentProblem& problem, const LevelSpec& spec, const SdpOptions& opts) {
    const CompiledProblem compiled = compile(problem);
    GuessResult r;
    r.spec = spec;
    r.variables = problem.variableCount();
    BoundResult b = maximize(problem, compiled, opts);
    if (b.solution.status == SdpStatus::Infeasible && !b.solution.unbounded)
        throw InputError("infeasible constraints: no behavior in the relaxation matches the data");
    r.p = b.value;
    r.primal = b.primalValue;
    r.gap = b.gap;
    if (b.optimal()) r.dual = dualCertificate(b.solution, problem, compiled);
    r.solution = std::move(b.solution);
    return r;
}

}  // namespace

GuessResult pguessQuantumLocal(const BellScenario& scenario, int xStar, const LevelSpec& spec,
                               const std::vector<DataSpec>& data, const SdpOptions& opts) {
    const BellScenario ab = scenario.withoutEve();
    if (xStar < 0 || xStar >= ab.settings(0)) throw InputError("setting x* out of range");
    const int outcomes = ab.outcomes(0, xStar);
    const MomentProblem p =
        buildBellMomentProblem(ab.withEve({outcomes}), spec, guessLocalForm(xStar, outcomes), data);
    return solveGuess(p, spec, opts);
}

GuessResult pguessQuantumLocal(const Fixture& fixture, int xStar, const LevelSpec& spec, ConstraintMode mode,
                               const SdpOptions& opts) {
    if (fixture.kind != CertKind::Bell) throw InputError("fixture '" + fixture.name + "' is not a Bell fixture");
    return pguessQuantumLocal(elegantScenario(), xStar, spec, nietoSillerasConstraints(fixture, mode), opts);
}

GuessResult pguessQuantumSecretPm(const PmScenario& scenario, int yStar, int dimension, const LevelSpec& spec,
                                  const std::vector<DataSpec>& data, const SdpOptions& opts) {
    scenario.validate();
    if (yStar < 0 || yStar >= static_cast<int>(scenario.measurements.size()))
        throw InputError("setting y* out of range");
    const int outcomes = scenario.measurements[static_cast<std::size_t>(yStar)];
    const MomentProblem p = buildPmMomentProblem(scenario, dimension, spec,
                                                 guessPmForm(yStar, scenario.preparations, outcomes), data, outcomes);
    return solveGuess(p, spec, opts);
}

GuessResult pguessQuantumSecretPm(const Fixture& fixture, int yStar, int dimension, const LevelSpec& spec,
                                  const SdpOptions& opts) {
    if (fixture.kind != CertKind::PrepareMeasure)
        throw InputError("fixture '" + fixture.name + "' is not a prepare-and-measure fixture");
    return pguessQuantumSecretPm(reducedQracScenario(), yStar, dimension, spec,
                                 eventConstraints(fixture.impliedPmBehavior()), opts);
}

std::vector<DataSpec> eventConstraints(const PmBehavior& p) {
    const PmScenario& s = p.scenario();
    std::vector<DataSpec> out;
    for (int x = 0; x < s.preparations; ++x)
        for (int y = 0; y < static_cast<int>(s.measurements.size()); ++y)
            for (int b = 0; b + 1 < s.measurements[static_cast<std::size_t>(y)]; ++b) {
                DataSpec d;
                d.name = "P(" + std::to_string(b + 1) + "|" + std::to_string(x + 1) + "," + std::to_string(y + 1) + ")";
                d.functional.add(Event{-1, b, x, y}, 1.0);
                d.sense = Sense::Equal;
                d.value = p(b, x, y);
                out.push_back(std::move(d));
            }
    return out;
}

std::vector<DataSpec> eventConstraints(const BellBehavior& p) {
    const BellScenario& s = p.scenario();
    std::vector<DataSpec> out;
    for (int x = 0; x < s.settings(0); ++x)
        for (int y = 0; y < s.settings(1); ++y)
            for (int a = 0; a < s.outcomes(0, x); ++a)
                for (int b = 0; b < s.outcomes(1, y); ++b) {
                    // Marginals and normalization fix the eliminated outcomes.
                    if (a + 1 == s.outcomes(0, x) && b + 1 == s.outcomes(1, y)) continue;
                    DataSpec d;
                    d.name = "P(" + std::to_string(a + 1) + "," + std::to_string(b + 1) + "|" + std::to_string(x + 1) +
                             "," + std::to_string(y + 1) + ")";
                    d.functional.add(Event{a, b, x, y}, 1.0);
                    d.sense = Sense::Equal;
                    d.value = p(a, b, x, y);
                    out.push_back(std::move(d));
                }
    return out;
}

// ---------------------------------------------------------------------------

std::string GuessStrategy::label() const {
    std::string s;
    if (!a.empty()) {
        s += "a=";
        for (int v : a) s += std::to_string(v + 1);
        s += ";";
    }
    s += "b=";
    for (int v : b) s += std::to_string(v + 1);
    return s;
}

std::vector<std::vector<int>> enumerateTuples(const std::vector<int>& counts) {
    std::vector<std::vector<int>> out{{}};
    for (int c : counts) {
        if (c < 1) throw InputError("outcome count must be positive");
        std::vector<std::vector<int>> next;
        next.reserve(out.size() * static_cast<std::size_t>(c));
        for (const auto& t : out)
            for (int v = 0; v < c; ++v) {
                auto u = t;
                u.push_back(v);
                next.push_back(std::move(u));
            }
        out = std::move(next);
    }
    return out;
}

std::vector<GuessStrategy> enumerateGuessStrategies(const BellScenario& scenario, int xStar) {
    const BellScenario ab = scenario.withoutEve();
    if (xStar < 0 || xStar >= ab.settings(0)) throw InputError("setting x* out of range");
    const int ny = ab.settings(1);
    std::vector<int> counts;
    for (int y = 0; y < ny; ++y) counts.push_back(ab.outcomes(0, xStar));
    for (int y = 0; y < ny; ++y) counts.push_back(ab.outcomes(1, y));
    std::vector<GuessStrategy> out;
    int id = 0;
    for (const auto& t : enumerateTuples(counts)) {
        GuessStrategy s;
        s.id = id++;
        s.a.assign(t.begin(), t.begin() + ny);
        s.b.assign(t.begin() + ny, t.end());
        out.push_back(std::move(s));
    }
    return out;
}

std::vector<GuessStrategy> enumerateGuessStrategies(const PmScenario& scenario, int yStar) {
    scenario.validate();
    if (yStar < 0 || yStar >= static_cast<int>(scenario.measurements.size()))
        throw InputError("setting y* out of range");
    std::vector<int> counts(static_cast<std::size_t>(scenario.preparations),
                            scenario.measurements[static_cast<std::size_t>(yStar)]);
    std::vector<GuessStrategy> out;
    int id = 0;
    for (const auto& t : enumerateTuples(counts)) {
        GuessStrategy s;
        s.id = id++;
        s.b = t;
        out.push_back(std::move(s));
    }
    return out;
}

EventForm bellGuessForm(const GuessStrategy& s, int xStar) {
    if (s.a.size() != s.b.size() || s.b.empty()) throw InputError("Bell guess strategy needs one (a, b) pair per setting");
    EventForm f;
    const double w = 1.0 / static_cast<double>(s.b.size());
    for (std::size_t y = 0; y < s.b.size(); ++y)
        f.add({{kA, xStar, s.a[y]}, {kB, static_cast<int>(y), s.b[y]}}, w);
    return f;
}

EventForm pmGuessForm(const GuessStrategy& s, int yStar, int preparations) {
    if (static_cast<int>(s.b.size()) != preparations) throw InputError("guess strategy needs one outcome per preparation");
    EventForm f;
    for (int x = 0; x < preparations; ++x)
        f.add({{kP, x, 0}, {kB, yStar, s.b[static_cast<std::size_t>(x)]}}, 1.0 / preparations);
    return f;
}

std::vector<SweepPoint> sweepK(const Fixture& fixture, const std::vector<double>& kGrid, const SweepPipeline& pipeline) {
    const std::string id = fixture.kind == CertKind::Bell ? "elegant" : "reduced-qrac";
    std::vector<SweepPoint> out;
    for (double k : kGrid) {
        const Certificate cert = certificateById(id, k);
        SweepPoint pt = pipeline(k, fixture.certificateValue(cert));
        pt.k = k;
        out.push_back(pt);
    }
    return out;
}

}  // namespace povmrand
