#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <omp.h>

#include "povmrand/certify.hpp"
#include "povmrand/eat.hpp"
#include "povmrand/qsim.hpp"
#include "povmrand/sdp.hpp"

using namespace povmrand;
using ojson = nlohmann::ordered_json;

namespace {

enum Exit { kOk = 0, kConfigError = 2, kSolverFailure = 3, kInfeasible = 4 };

class SolverFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string output;
    bool noTimestamp = false;
    int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    std::uint64_t seed = 12345;
    double gapTol = 1e-8;
    double feasTol = 1e-8;
    int maxIter = 200;

    SdpOptions solver() const {
        SdpOptions o;
        o.gapTolerance = gapTol;
        o.feasibilityTolerance = feasTol;
        o.maxIterations = maxIter;
        return o;
    }
};

std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string hex(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string timestamp() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return buf;
}

void emit(const Common& c, const std::string& text) {
    if (c.output.empty() || c.output == "-") {
        std::cout << text;
        std::cout.flush();
        return;
    }
    std::ofstream f(c.output);
    if (!f) throw InputError("cannot write '" + c.output + "'");
    f << text;
}

int oneBased(int v, const char* name) {
    if (v < 1) throw InputError(std::string(name) + " is 1-based and must be at least 1");
    return v - 1;
}

std::vector<double> parseList(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw InputError("not a number list: '" + s + "'");
        }
    }
    if (out.empty()) throw InputError("empty number list");
    return out;
}

std::vector<LevelSpec> parseLadder(const std::string& s) {
    std::vector<LevelSpec> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(LevelSpec::parse(item));
    if (out.empty()) throw InputError("empty level ladder");
    return out;
}

// Every report carries the configuration hash, solver tolerances and levels.
struct Report {
    ojson j;
    ojson gaps = ojson::array();

    Report(const std::string& command, const std::string& configText, const Common& c) {
        j["command"] = command;
        j["config_hash"] = hex(fnv1a(configText));
        j["solver"] = {{"gap_tolerance", c.gapTol}, {"feasibility_tolerance", c.feasTol}, {"max_iterations", c.maxIter}};
        if (!c.noTimestamp) j["timestamp"] = timestamp();
    }
    void gap(const std::string& what, double g, const std::string& status) {
        gaps.push_back({{"solve", what}, {"duality_gap", g}, {"status", status}});
    }
    std::string str() {
        j["duality_gaps"] = gaps;
        return j.dump(2) + "\n";
    }
};

void requireOptimal(const SdpSolution& s, const std::string& what) {
    if (s.status == SdpStatus::Infeasible && !s.unbounded) throw InputError("infeasible " + what);
    if (!s.optimal()) throw SolverFailure(what + ": solver status " + statusName(s.status));
}

ojson certificateJson(const Certificate& c) {
    ojson terms = ojson::array();
    for (const auto& t : c.functional.terms)
        terms.push_back({{"a", t.event.a + 1}, {"b", t.event.b + 1}, {"x", t.event.x + 1}, {"y", t.event.y + 1}, {"weight", t.weight}});
    return {{"id", c.id}, {"constant", c.functional.constant}, {"terms", terms}};
}

bool isBell(const Certificate& c) { return c.kind == CertKind::Bell; }

BellScenario bellScenarioOf(const Certificate& c) { return c.id == "chsh" ? chshScenario() : elegantScenario(); }

std::string defaultLevel(const Certificate& c) { return c.id == "chsh" ? "1+AB" : "2"; }

// ---------------------------------------------------------------------------

struct TsirelsonArgs {
    std::string cert = "elegant";
    double k = 0;
    std::string level;
    int dim = 2;
    int restarts = 20;
};

std::string runTsirelson(const TsirelsonArgs& a, const Common& c, const std::string& cfg) {
    const Certificate cert = certificateById(a.cert, a.k);
    const LevelSpec spec = LevelSpec::parse(a.level.empty() ? defaultLevel(cert) : a.level);
    Report r("tsirelson", cfg, c);
    r.j["certificate"] = a.cert;
    r.j["k"] = a.k;
    r.j["level"] = spec.str();
    SeesawOptions so;
    so.restarts = a.restarts;
    so.seed = c.seed;
    double lower;
    BoundResult b;
    if (isBell(cert)) {
        const MomentProblem p = buildBellMomentProblem(bellScenarioOf(cert), spec, EventForm::fromBell(cert.functional));
        b = maximize(p, c.solver());
        lower = seesawBell(bellScenarioOf(cert), cert.functional, a.dim, so).value;
    } else {
        const PmScenario s = reducedQracScenario();
        const MomentProblem p = buildPmMomentProblem(s, a.dim, spec, EventForm::fromPm(cert.functional));
        b = maximize(p, c.solver());
        PmScenario sd = s;
        sd.dimension = a.dim;
        lower = seesawPm(sd, cert.functional, so).value;
    }
    requireOptimal(b.solution, "Tsirelson bound");
    r.gap("npa", b.gap, statusName(b.solution.status));
    r.j["bound"] = b.value;
    r.j["seesaw_lower_bound"] = lower;
    r.j["bound_minus_seesaw"] = b.value - lower;
    r.j["quantum_bound_T"] = cert.quantumBound;
    return r.str();
}

// ---------------------------------------------------------------------------

struct CurveArgs {
    std::string cert = "elegant";
    double k = 2;
    std::string adversary = "classical";
    int points = 25;
    std::string levels;
    std::string etas;
    std::string checkpoint;
    int x = 4, y = 4, dim = 2;
    bool noSymmetry = false;
    std::string format = "csv";
};

std::string sampleLine(const CurveSample& s) {
    ojson j{{"q", s.q}, {"p", s.p}, {"level", s.level}, {"strategy", s.strategy}, {"gap", s.gap}, {"ok", s.ok}, {"warning", s.warning}};
    return j.dump();
}

std::vector<CurveSample> readCheckpoint(const std::string& path) {
    std::vector<CurveSample> out;
    if (path.empty()) return out;
    std::ifstream f(path);
    std::string line;
    int n = 0;
    while (std::getline(f, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            const auto j = ojson::parse(line);
            CurveSample s;
            s.q = j.at("q");
            s.p = j.at("p");
            s.level = j.at("level");
            s.strategy = j.at("strategy");
            s.gap = j.at("gap");
            s.ok = j.at("ok");
            s.warning = j.at("warning");
            out.push_back(s);
        } catch (const std::exception&) {
            throw InputError("checkpoint '" + path + "' line " + std::to_string(n) + " is malformed");
        }
    }
    return out;
}

GuessingCurve computeCurve(const CurveArgs& a, const Common& c, std::vector<double>& gaps) {
    const Certificate cert = certificateById(a.cert, a.k);
    std::vector<double> grid;
    if (!a.etas.empty()) {
        for (double eta : parseList(a.etas)) grid.push_back(cert.whiteNoise + eta * (cert.quantumBound - cert.whiteNoise));
    } else {
        grid = certificateGrid(cert, a.points);
    }
    std::ofstream ck;
    const auto done = readCheckpoint(a.checkpoint);
    if (!a.checkpoint.empty()) ck.open(a.checkpoint, std::ios::app);

    if (a.adversary == "classical") {
        ClassicalSweepConfig cfg;
        cfg.ladder = a.levels.empty() ? (isBell(cert) ? defaultBellClassicalLadder() : defaultPmClassicalLadder())
                                      : parseLadder(a.levels);
        cfg.workers = c.workers;
        cfg.solver = c.solver();
        cfg.useSymmetry = !a.noSymmetry;
        cfg.dimension = a.dim;
        cfg.xStar = oneBased(a.x, "--x");
        cfg.yStar = oneBased(a.y, "--y");
        cfg.done = done;
        cfg.onSample = [&](const CurveSample& s) {
            if (!s.ok) std::cerr << "warning: q=" << s.q << " skipped: " << s.warning << "\n";
            if (ck) ck << sampleLine(s) << "\n" << std::flush;
        };
        GuessingCurve curve = pguessClassical(cert, grid, cfg);
        for (const auto& s : curve.samples) gaps.push_back(s.gap);
        return curve;
    }
    if (a.adversary != "quantum") throw InputError("--adversary must be quantum or classical");
    if (!isBell(cert)) throw InputError("quantum curves are available for Bell certificates");
    const LevelSpec spec = LevelSpec::parse(a.levels.empty() ? "2+ABE" : a.levels);
    GuessingCurve curve;
    curve.certificateId = cert.id;
    for (double q : grid) {
        auto it = std::find_if(done.begin(), done.end(), [q](const CurveSample& s) { return std::abs(s.q - q) <= 1e-12; });
        CurveSample s;
        if (it != done.end()) {
            s = *it;
        } else {
            s.q = q;
            s.level = spec.str();
            try {
                const GuessResult g = pguessQuantumLocal(bellScenarioOf(cert), oneBased(a.x, "--x"), spec,
                                                         {{"certificate", cert.functional, Sense::Equal, q}}, c.solver());
                s.p = g.p;
                s.gap = g.gap;
                if (!g.solution.optimal()) {
                    s.ok = false;
                    s.warning = std::string("solver ") + statusName(g.solution.status);
                }
            } catch (const InputError& e) {
                s.ok = false;
                s.warning = e.what();
            }
            if (!s.ok) std::cerr << "warning: q=" << q << " skipped: " << s.warning << "\n";
            if (ck) ck << sampleLine(s) << "\n" << std::flush;
        }
        gaps.push_back(s.gap);
        curve.samples.push_back(s);
    }
    int ok = 0;
    for (const auto& s : curve.samples) ok += s.ok;
    if (ok >= 2) curve.rebuildEnvelope();
    return curve;
}

std::string runCurve(const CurveArgs& a, const Common& c, const std::string& cfg) {
    std::vector<double> gaps;
    const GuessingCurve curve = computeCurve(a, c, gaps);
    double worst = 0;
    for (double g : gaps) worst = std::max(worst, std::abs(g));
    if (a.format == "json") {
        const Certificate cert = certificateById(a.cert, a.k);
        ojson j;
        j["certificate"] = a.cert;
        j["k"] = a.k;
        j["adversary"] = a.adversary;
        j["setting"] = a.adversary == "quantum" || isBell(cert) ? a.x : a.y;
        j["config_hash"] = hex(fnv1a(cfg));
        j["max_duality_gap"] = worst;
        ojson pts = ojson::array();
        for (const auto& s : curve.samples) {
            if (!s.ok) continue;
            pts.push_back({{"eta", relativeValue(s.q, cert)}, {"q", s.q}, {"pguess", s.p},
                           {"min_entropy_bits", minEntropy(std::min(1.0, s.p))}, {"level", s.level}, {"gap", s.gap}});
        }
        j["points"] = pts;
        return j.dump(2) + "\n";
    }
    std::string header = c.noTimestamp ? "" : "generated " + timestamp() + " ";
    header += "config_hash=" + hex(fnv1a(cfg));
    if (!c.noTimestamp) return curve.csv(header);
    // Without the timestamp the header still records the configuration and the worst gap.
    char buf[64];
    std::snprintf(buf, sizeof buf, " max_duality_gap=%.3g", worst);
    return curve.csv(header + buf);
}

// ---------------------------------------------------------------------------

struct PguessArgs {
    std::string fixture = "elegant-2019";
    std::string adversary = "quantum";
    int x = 4, y = 4, dim = 2;
    std::string level;
    std::string mode = "inequality";
    double k = 2;
    int points = 25;
    std::string levels;
    std::string checkpoint;
};

std::string runPguess(const PguessArgs& a, const Common& c, const std::string& cfg) {
    const Fixture fx = loadFixture(a.fixture);
    Report r("pguess", cfg, c);
    r.j["fixture"] = fx.name;
    r.j["adversary"] = a.adversary;
    if (a.adversary == "quantum") {
        GuessResult g;
        if (fx.kind == CertKind::Bell) {
            if (a.mode != "inequality" && a.mode != "equality") throw InputError("--mode must be inequality or equality");
            const LevelSpec spec = LevelSpec::parse(a.level.empty() ? "2+ABE" : a.level);
            g = pguessQuantumLocal(fx, oneBased(a.x, "--x"), spec,
                                   a.mode == "equality" ? ConstraintMode::Equality : ConstraintMode::Inequality, c.solver());
            r.j["setting_x"] = a.x;
            r.j["mode"] = a.mode;
        } else {
            const LevelSpec spec = LevelSpec::parse(a.level.empty() ? defaultPmQuantumSpec().str() : a.level);
            g = pguessQuantumSecretPm(fx, oneBased(a.y, "--y"), a.dim, spec, c.solver());
            r.j["setting_y"] = a.y;
            r.j["dimension"] = a.dim;
        }
        requireOptimal(g.solution, "guessing probability");
        r.gap("guess", g.gap, statusName(g.solution.status));
        r.j["level"] = g.spec.str();
        r.j["variables"] = g.variables;
        r.j["pguess"] = g.p;
        r.j["pguess_primal"] = g.primal;
        r.j["min_entropy_bits"] = minEntropy(std::min(1.0, g.p));
        if (g.dual) {
            r.j["dual_certificate"] = certificateJson(*g.dual);
            r.j["dual_value_on_fixture"] =
                fx.kind == CertKind::Bell ? g.dual->evaluate(fx.impliedBellBehavior()) : g.dual->evaluate(fx.impliedPmBehavior());
        }
        return r.str();
    }
    if (a.adversary != "classical") throw InputError("--adversary must be quantum or classical");
    CurveArgs ca;
    ca.cert = fx.kind == CertKind::Bell ? "elegant" : "reduced-qrac";
    ca.k = a.k;
    ca.points = a.points;
    ca.levels = a.levels;
    ca.checkpoint = a.checkpoint;
    ca.x = a.x;
    ca.y = a.y;
    ca.dim = a.dim;
    std::vector<double> gaps;
    const GuessingCurve curve = computeCurve(ca, c, gaps);
    const Certificate cert = certificateById(ca.cert, a.k);
    const double q = fx.certificateValue(cert);
    if (curve.envelope.empty()) throw SolverFailure("too few curve points solved");
    const double h = curve.envelope(q);
    for (const auto& s : curve.samples) r.gap("q=" + std::to_string(s.q), s.gap, s.ok ? "ok" : s.warning);
    r.j["certificate"] = ca.cert;
    r.j["k"] = a.k;
    r.j["certificate_value"] = q;
    r.j["levels"] = curve.samples.empty() ? "" : curve.samples.back().level;
    r.j["pguess"] = std::exp2(-h);
    r.j["min_entropy_bits"] = h;
    return r.str();
}

// ---------------------------------------------------------------------------

struct SweepArgs {
    std::string fixture = "pnm-2019";
    std::string kGrid = "0,0.5,1,1.5,2,2.5,3";
    std::string adversary = "classical";
    std::string levels;
    int points = 25;
    int x = 4, y = 4, dim = 2;
};

std::string runSweepK(const SweepArgs& a, const Common& c, const std::string& cfg) {
    const Fixture fx = loadFixture(a.fixture);
    const std::string certId = fx.kind == CertKind::Bell ? "elegant" : "reduced-qrac";
    std::string levelText;
    const SweepPipeline pipeline = [&](double k, double q) {
        SweepPoint pt;
        pt.q = q;
        if (a.adversary == "classical") {
            CurveArgs ca;
            ca.cert = certId;
            ca.k = k;
            ca.points = a.points;
            ca.levels = a.levels;
            ca.x = a.x;
            ca.y = a.y;
            ca.dim = a.dim;
            std::vector<double> gaps;
            const GuessingCurve curve = computeCurve(ca, c, gaps);
            if (curve.envelope.empty()) throw SolverFailure("too few curve points solved");
            pt.p = std::exp2(-curve.envelope(q));
            for (double g : gaps) pt.gap = std::max(pt.gap, std::abs(g));
            levelText = curve.samples.back().level;
        } else if (a.adversary == "quantum") {
            const Certificate cert = certificateById(certId, k);
            const std::vector<DataSpec> data{{"certificate", cert.functional, Sense::Equal, q}};
            GuessResult g;
            if (fx.kind == CertKind::Bell) {
                const LevelSpec spec = LevelSpec::parse(a.levels.empty() ? "2+ABE" : a.levels);
                g = pguessQuantumLocal(elegantScenario(), oneBased(a.x, "--x"), spec, data, c.solver());
            } else {
                const LevelSpec spec = LevelSpec::parse(a.levels.empty() ? defaultPmQuantumSpec().str() : a.levels);
                g = pguessQuantumSecretPm(reducedQracScenario(), oneBased(a.y, "--y"), a.dim, spec, data, c.solver());
            }
            requireOptimal(g.solution, "sweep point");
            pt.p = g.p;
            pt.gap = g.gap;
            levelText = g.spec.str();
        } else {
            throw InputError("--adversary must be quantum or classical");
        }
        return pt;
    };
    const auto points = sweepK(fx, parseList(a.kGrid), pipeline);
    std::string out;
    if (!c.noTimestamp) out += "# generated " + timestamp() + " config_hash=" + hex(fnv1a(cfg)) + "\n";
    out += "k,q,pguess,min_entropy_bits,level,max_duality_gap\n";
    char buf[200];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.10g,%.10g,%s,%.3g\n", p.k, p.q, p.p, minEntropy(std::min(1.0, p.p)),
                      levelText.c_str(), p.gap);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------

struct EatArgs {
    EatParams params;
    double slope = NAN, intercept = NAN;
    double eta0 = 0.993, step = 1e-3;
};

std::string runEat(const EatArgs& a, const Common& c, const std::string& cfg) {
    Report r("eat", cfg, c);
    MinTradeoff f;
    if (!std::isnan(a.slope) || !std::isnan(a.intercept)) {
        if (std::isnan(a.slope) || std::isnan(a.intercept)) throw InputError("--slope and --intercept go together");
        f = MinTradeoff::fromLine(a.slope, a.intercept, a.eta0);
        r.j["tradeoff_source"] = "flags";
    } else {
        const EntropyCurve curve = computedEntropyCurve();
        f = minTradeoffFromCurve(curve, a.eta0, a.step);
        r.j["tradeoff_source"] = "computed curve";
        ojson pts = ojson::array();
        for (const auto& [eta, h] : curve.points) pts.push_back({{"eta", eta}, {"min_entropy_bits", h}});
        r.j["curve"] = pts;
    }
    const NetRate n = netRate(a.params, f);
    const auto& p = a.params;
    r.j["params"] = {{"beta", p.beta}, {"gamma", p.gamma}, {"p_omega", p.pOmega}, {"eps_s", p.epsS},
                     {"rounds", p.rounds}, {"event_rate", p.eventRate}, {"eta", p.eta}, {"eta_sigma", p.etaSigma},
                     {"eta_threshold", p.etaThreshold()}};
    r.j["min_tradeoff"] = {{"slope", f.slope}, {"intercept", f.intercept}, {"eta0", f.eta0}, {"D", f.D}};
    r.j["epsilon_v"] = n.entropy.epsV;
    r.j["epsilon_k"] = n.entropy.epsK;
    r.j["epsilon_omega"] = n.entropy.epsOmega;
    r.j["f_at_threshold"] = n.entropy.fAtThreshold;
    r.j["certified_entropy_bits"] = n.entropy.total;
    r.j["certified"] = n.entropy.certified;
    r.j["gross_bits_per_event"] = n.grossPerEvent;
    r.j["consumption_bits_per_event"] = n.consumption;
    r.j["net_bits_per_event"] = n.netPerEvent;
    r.j["net_bits_per_second"] = n.bitsPerSecond;
    r.j["consumption_to_generation_ratio"] = n.ratio;
    r.j["expanding"] = n.expanding;
    ojson rows = ojson::array();
    for (const auto& row : compareProtocols(a.params, f))
        rows.push_back({{"label", row.label}, {"event_rate_hz", row.eventRateHz}, {"raw_bits_per_event", row.rawBitsPerEvent},
                        {"bit_rate", row.bitRate}, {"bit_rate_over_event_rate", row.bitRateOverEventRate}});
    r.j["protocols"] = rows;
    return r.str();
}

// ---------------------------------------------------------------------------

struct ExportArgs {
    std::string cert = "elegant";
    double k = 0;
    std::string level;
    int dim = 2;
    std::string fixture;
    int x = 4;
};

std::string runExport(const ExportArgs& a) {
    MomentProblem p;
    if (!a.fixture.empty()) {
        const Fixture fx = loadFixture(a.fixture);
        if (fx.kind != CertKind::Bell) throw InputError("export from a fixture needs a Bell fixture");
        const BellScenario s = elegantScenario();
        const int x = oneBased(a.x, "--x");
        p = buildBellMomentProblem(s.withEve({s.outcomes(0, x)}), LevelSpec::parse(a.level.empty() ? "2+ABE" : a.level),
                                   guessLocalForm(x, s.outcomes(0, x)), nietoSillerasConstraints(fx, ConstraintMode::Inequality));
    } else {
        const Certificate cert = certificateById(a.cert, a.k);
        const LevelSpec spec = LevelSpec::parse(a.level.empty() ? defaultLevel(cert) : a.level);
        p = isBell(cert) ? buildBellMomentProblem(bellScenarioOf(cert), spec, EventForm::fromBell(cert.functional))
                         : buildPmMomentProblem(reducedQracScenario(), a.dim, spec, EventForm::fromPm(cert.functional));
    }
    return exportInterchange(compile(p).sdp);
}

// ---------------------------------------------------------------------------

struct OracleArgs {
    std::string cert = "elegant";
    double k = 1;
    int dim = 2;
    int restarts = 20;
};

std::string runOracle(const OracleArgs& a, const Common& c, const std::string& cfg) {
    const Certificate cert = certificateById(a.cert, a.k);
    Report r("oracle", cfg, c);
    SeesawOptions so;
    so.restarts = a.restarts;
    so.seed = c.seed;
    r.j["certificate"] = a.cert;
    r.j["k"] = a.k;
    r.j["dimension"] = a.dim;
    if (isBell(cert)) {
        const auto res = seesawBell(bellScenarioOf(cert), cert.functional, a.dim, so);
        r.j["value"] = res.value;
        r.j["converged"] = res.converged;
        r.j["strategy"] = ojson::parse(strategyToJson(res.strategy));
    } else {
        PmScenario s = reducedQracScenario();
        s.dimension = a.dim;
        const auto res = seesawPm(s, cert.functional, so);
        r.j["value"] = res.value;
        r.j["converged"] = res.converged;
        r.j["strategy"] = ojson::parse(strategyToJson(res.strategy));
    }
    r.j["quantum_bound_T"] = cert.quantumBound;
    return r.str();
}

std::string runFixtures(const std::string& show) {
    ojson j = ojson::array();
    for (const auto& name : fixtureNames()) {
        if (!show.empty() && name != show) continue;
        ojson e{{"name", name}};
        if (name == "mdi-protocols") {
            e["kind"] = "table";
            e["rows"] = publishedProtocolRows().size();
        } else {
            const Fixture f = loadFixture(name);
            e["kind"] = f.kind == CertKind::Bell ? "bell" : "prepare_measure";
            e["statistics"] = f.statistics.size();
            const Certificate c = f.kind == CertKind::Bell ? elegantCertificate(1) : reducedQracCertificate(1);
            const double q = f.certificateValue(c);
            e["certificate_k1"] = q;
            e["eta_k1"] = relativeValue(q, c);
            const Certificate c2 = f.kind == CertKind::Bell ? elegantCertificate(2) : reducedQracCertificate(2);
            e["certificate_k2"] = f.certificateValue(c2);
        }
        j.push_back(e);
    }
    if (!show.empty() && j.empty()) throw InputError("unknown fixture '" + show + "'");
    return j.dump(2) + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Randomness certification from POVM-based Bell and prepare-and-measure experiments"};
    app.set_config("--config", "", "INI/TOML configuration file; command-line flags override it");
    app.allow_config_extras(false);
    app.require_subcommand(1);
    app.fallthrough();

    Common common;
    app.add_option("-o,--output", common.output, "Output file (default stdout)");
    app.add_flag("--no-timestamp", common.noTimestamp, "Omit timestamps for byte-identical reruns");
    app.add_option("--workers", common.workers, "Worker threads")->check(CLI::PositiveNumber);
    app.add_option("--seed", common.seed, "Random seed for see-saw restarts");
    app.add_option("--gap-tol", common.gapTol, "Relative duality gap tolerance")->check(CLI::PositiveNumber);
    app.add_option("--feas-tol", common.feasTol, "Feasibility tolerance")->check(CLI::PositiveNumber);
    app.add_option("--max-iter", common.maxIter, "Interior-point iteration limit")->check(CLI::PositiveNumber);

    const std::vector<std::string> certs{"chsh", "elegant", "reduced-qrac"};

    TsirelsonArgs ts;
    auto* tsCmd = app.add_subcommand("tsirelson", "Maximize a certificate over the relaxation and by see-saw");
    tsCmd->add_option("--cert", ts.cert)->check(CLI::IsMember(certs));
    tsCmd->add_option("--k", ts.k, "Penalty weight")->check(CLI::NonNegativeNumber);
    tsCmd->add_option("--level", ts.level, "Level spec, e.g. 2 or 1+AB");
    tsCmd->add_option("--dim", ts.dim, "Local dimension")->check(CLI::Range(2, 8));
    tsCmd->add_option("--restarts", ts.restarts, "See-saw restarts")->check(CLI::PositiveNumber);

    PguessArgs pg;
    auto* pgCmd = app.add_subcommand("pguess", "Guessing probability bound for a fixture");
    pgCmd->add_option("--fixture", pg.fixture);
    pgCmd->add_option("--adversary", pg.adversary)->check(CLI::IsMember({"quantum", "classical"}));
    pgCmd->add_option("--x", pg.x, "Alice's setting (1-based)");
    pgCmd->add_option("--y", pg.y, "Bob's setting (1-based)");
    pgCmd->add_option("--dim", pg.dim)->check(CLI::Range(2, 8));
    pgCmd->add_option("--level", pg.level);
    pgCmd->add_option("--mode", pg.mode)->check(CLI::IsMember({"inequality", "equality"}));
    pgCmd->add_option("--k", pg.k, "Penalty weight (classical adversary)")->check(CLI::NonNegativeNumber);
    pgCmd->add_option("--points", pg.points)->check(CLI::Range(2, 1000));
    pgCmd->add_option("--levels", pg.levels, "Comma-separated refinement ladder (classical adversary)");
    pgCmd->add_option("--checkpoint", pg.checkpoint);

    CurveArgs cv;
    auto* cvCmd = app.add_subcommand("curve", "Guessing probability against certificate value (CSV)");
    cvCmd->add_option("--cert", cv.cert)->check(CLI::IsMember(certs));
    cvCmd->add_option("--k", cv.k)->check(CLI::NonNegativeNumber);
    cvCmd->add_option("--adversary", cv.adversary)->check(CLI::IsMember({"quantum", "classical"}));
    cvCmd->add_option("--points", cv.points)->check(CLI::Range(2, 1000));
    cvCmd->add_option("--levels", cv.levels, "Refinement ladder (classical) or level (quantum)");
    cvCmd->add_option("--eta", cv.etas, "Comma-separated relative certificate values instead of the grid");
    cvCmd->add_option("--checkpoint", cv.checkpoint, "Per-point results file; existing points are reused");
    cvCmd->add_option("--x", cv.x);
    cvCmd->add_option("--y", cv.y);
    cvCmd->add_option("--dim", cv.dim)->check(CLI::Range(2, 8));
    cvCmd->add_option("--format", cv.format, "csv, or json for a frozen entropy curve")->check(CLI::IsMember({"csv", "json"}));
    cvCmd->add_flag("--no-symmetry", cv.noSymmetry, "Solve every guess strategy instead of one per symmetry orbit");

    SweepArgs sw;
    auto* swCmd = app.add_subcommand("sweep-k", "Guessing probability against the penalty weight (CSV)");
    swCmd->add_option("--fixture", sw.fixture);
    swCmd->add_option("--k-grid", sw.kGrid);
    swCmd->add_option("--adversary", sw.adversary)->check(CLI::IsMember({"quantum", "classical"}));
    swCmd->add_option("--levels", sw.levels);
    swCmd->add_option("--points", sw.points)->check(CLI::Range(2, 1000));
    swCmd->add_option("--x", sw.x);
    swCmd->add_option("--y", sw.y);
    swCmd->add_option("--dim", sw.dim)->check(CLI::Range(2, 8));

    EatArgs ea;
    auto* eaCmd = app.add_subcommand("eat", "Finite-size entropy accumulation and net rate");
    eaCmd->add_option("--beta", ea.params.beta);
    eaCmd->add_option("--gamma", ea.params.gamma);
    eaCmd->add_option("--p-omega", ea.params.pOmega);
    eaCmd->add_option("--eps-s", ea.params.epsS);
    eaCmd->add_option("--rounds", ea.params.rounds);
    eaCmd->add_option("--event-rate", ea.params.eventRate);
    eaCmd->add_option("--eta", ea.params.eta);
    eaCmd->add_option("--eta-sigma", ea.params.etaSigma);
    eaCmd->add_option("--slope", ea.slope, "Min-tradeoff slope (default: from the computed curve)");
    eaCmd->add_option("--intercept", ea.intercept, "Min-tradeoff intercept");
    eaCmd->add_option("--eta0", ea.eta0, "Tangent point");
    eaCmd->add_option("--step", ea.step, "Forward-difference step");

    ExportArgs ex;
    auto* exCmd = app.add_subcommand("export-sdpa", "Write the compiled SDP in sparse interchange format");
    exCmd->add_option("--cert", ex.cert)->check(CLI::IsMember(certs));
    exCmd->add_option("--k", ex.k)->check(CLI::NonNegativeNumber);
    exCmd->add_option("--level", ex.level);
    exCmd->add_option("--dim", ex.dim)->check(CLI::Range(2, 8));
    exCmd->add_option("--fixture", ex.fixture, "Export the quantum-adversary problem of a Bell fixture instead");
    exCmd->add_option("--x", ex.x);

    OracleArgs orc;
    auto* orCmd = app.add_subcommand("oracle", "See-saw lower bound with an explicit strategy");
    orCmd->add_option("--cert", orc.cert)->check(CLI::IsMember(certs));
    orCmd->add_option("--k", orc.k)->check(CLI::NonNegativeNumber);
    orCmd->add_option("--dim", orc.dim)->check(CLI::Range(2, 8));
    orCmd->add_option("--restarts", orc.restarts)->check(CLI::PositiveNumber);

    std::string show;
    auto* fxCmd = app.add_subcommand("fixtures", "List the bundled fixtures");
    fxCmd->add_option("--show", show, "Only this fixture");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        omp_set_num_threads(common.workers);
        const std::string cfg = app.config_to_str(true, false);
        std::string out;
        if (*tsCmd) out = runTsirelson(ts, common, cfg);
        else if (*pgCmd) out = runPguess(pg, common, cfg);
        else if (*cvCmd) out = runCurve(cv, common, cfg);
        else if (*swCmd) out = runSweepK(sw, common, cfg);
        else if (*eaCmd) out = runEat(ea, common, cfg);
        else if (*exCmd) out = runExport(ex);
        else if (*orCmd) out = runOracle(orc, common, cfg);
        else if (*fxCmd) out = runFixtures(show);
        emit(common, out);
    } catch (const InputError& e) {
        const std::string what = e.what();
        std::cerr << "error: " << what << "\n";
        return what.find("infeasible") != std::string::npos ? kInfeasible : kConfigError;
    } catch (const SolverFailure& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kSolverFailure;
    }
    return kOk;
}
