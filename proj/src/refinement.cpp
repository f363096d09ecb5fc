#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

#include "povmrand/certify.hpp"

namespace povmrand {

namespace {

int argMax(const std::vector<double>& v) {
    int best = 0;
    for (int i = 1; i < static_cast<int>(v.size()); ++i)
        if (v[static_cast<std::size_t>(i)] > v[static_cast<std::size_t>(best)]) best = i;
    return best;
}

}  // namespace

RefinementResult iterativeRefinement(int strategies, int rungs, const BoundOracle& oracle, int workers) {
    if (strategies < 1) throw InputError("iterative refinement needs at least one strategy");
    if (rungs < 1) throw InputError("iterative refinement needs at least one level");
    RefinementResult r;
    r.bound.assign(static_cast<std::size_t>(strategies), 1.0);
    r.rung.assign(static_cast<std::size_t>(strategies), 0);
    r.history.assign(static_cast<std::size_t>(strategies), {});

    // Optional speculative evaluation of the first rung; results are consumed in the
    // same order as the sequential loop, so the outcome does not depend on `workers`.
    std::vector<double> first;
    std::vector<char> have;
    if (workers > 1) {
        first.assign(static_cast<std::size_t>(strategies), 0.0);
        have.assign(static_cast<std::size_t>(strategies), 0);
        std::vector<std::string> errors(static_cast<std::size_t>(strategies));
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (int i = 0; i < strategies; ++i) {
            try {
                first[static_cast<std::size_t>(i)] = oracle(i, 0);
                have[static_cast<std::size_t>(i)] = 1;
            } catch (const std::exception& e) {
                errors[static_cast<std::size_t>(i)] = e.what();
            }
        }
        r.solves += static_cast<int>(std::count(have.begin(), have.end(), 1));
    }

    for (;;) {
        const int i = argMax(r.bound);
        const auto ui = static_cast<std::size_t>(i);
        if (r.rung[ui] == rungs) {
            r.best = i;
            r.value = r.bound[ui];
            return r;
        }
        double v;
        if (r.rung[ui] == 0 && !have.empty() && have[ui]) {
            v = first[ui];
        } else {
            v = oracle(i, r.rung[ui]);
            ++r.solves;
        }
        r.bound[ui] = v;
        r.history[ui].push_back(v);
        ++r.rung[ui];
    }
}

RefinementResult exhaustiveMaximum(int strategies, int rungs, const BoundOracle& oracle, int workers) {
    if (strategies < 1) throw InputError("enumeration needs at least one strategy");
    RefinementResult r;
    r.bound.assign(static_cast<std::size_t>(strategies), 1.0);
    r.rung.assign(static_cast<std::size_t>(strategies), rungs);
    r.history.assign(static_cast<std::size_t>(strategies), {});
    std::vector<std::string> errors(static_cast<std::size_t>(strategies));
#pragma omp parallel for schedule(dynamic, 1) num_threads(std::max(1, workers))
    for (int i = 0; i < strategies; ++i) {
        try {
            r.bound[static_cast<std::size_t>(i)] = oracle(i, rungs - 1);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);
    for (int i = 0; i < strategies; ++i) r.history[static_cast<std::size_t>(i)].push_back(r.bound[static_cast<std::size_t>(i)]);
    r.solves = strategies;
    r.best = argMax(r.bound);
    r.value = r.bound[static_cast<std::size_t>(r.best)];
    return r;
}

// ---------------------------------------------------------------------------

namespace {

class SolveFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Relabelings (preparation permutation, per-setting outcome maps) that leave the
// certificate invariant. Settings whose outcome count equals the number of preparations
// are permuted alongside the preparations; binary settings may be flipped.
struct Relabeling {
    std::vector<int> prep;
    std::vector<std::vector<int>> outcome;  // per setting
};

std::map<Event, double> termMap(const Functional& f) {
    std::map<Event, double> m;
    for (const auto& t : f.terms) m[t.event] += t.weight;
    for (auto it = m.begin(); it != m.end();)
        it = std::abs(it->second) < 1e-14 ? m.erase(it) : std::next(it);
    return m;
}

std::vector<Relabeling> pmSymmetries(const PmScenario& s, const Functional& f) {
    const auto base = termMap(f);
    std::vector<int> perm(static_cast<std::size_t>(s.preparations));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> binary;
    for (int y = 0; y < static_cast<int>(s.measurements.size()); ++y)
        if (s.measurements[static_cast<std::size_t>(y)] == 2) binary.push_back(y);
    std::vector<Relabeling> out;
    do {
        for (int flips = 0; flips < (1 << binary.size()); ++flips) {
            Relabeling r;
            r.prep = perm;
            for (int y = 0; y < static_cast<int>(s.measurements.size()); ++y) {
                const int o = s.measurements[static_cast<std::size_t>(y)];
                std::vector<int> map(static_cast<std::size_t>(o));
                std::iota(map.begin(), map.end(), 0);
                if (o == s.preparations) map = perm;
                r.outcome.push_back(map);
            }
            for (std::size_t k = 0; k < binary.size(); ++k)
                if (flips >> k & 1) r.outcome[static_cast<std::size_t>(binary[k])] = {1, 0};
            std::map<Event, double> image;
            for (const auto& [e, w] : base) {
                Event g = e;
                g.x = r.prep[static_cast<std::size_t>(e.x)];
                g.b = r.outcome[static_cast<std::size_t>(e.y)][static_cast<std::size_t>(e.b)];
                image[g] += w;
            }
            bool same = image.size() == base.size();
            for (auto it = image.cbegin(), jt = base.cbegin(); same && it != image.end(); ++it, ++jt)
                same = it->first == jt->first && std::abs(it->second - jt->second) <= 1e-12;
            if (same) out.push_back(std::move(r));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

BellScenario bellScenarioFor(const Certificate& cert) {
    if (cert.id == "chsh") return chshScenario();
    if (cert.id == "elegant") return elegantScenario();
    throw InputError("no Bell scenario for certificate '" + cert.id + "'");
}

PmScenario pmScenarioFor(const Certificate& cert) {
    if (cert.id == "reduced-qrac") return reducedQracScenario();
    if (cert.id == "rac") return racScenario(2, 2);
    throw InputError("no prepare-and-measure scenario for certificate '" + cert.id + "'");
}

double acceptedBound(const BoundResult& b) {
    const auto& s = b.solution;
    if (s.unbounded) return 1.0;  // the relaxation gives nothing beyond the trivial bound
    if (s.status == SdpStatus::Infeasible) throw SolveFailure("infeasible: certificate value not attainable");
    const bool nearOptimal = s.relativeGap <= 1e-6 && s.primalInfeasibility <= 1e-6 && s.dualInfeasibility <= 1e-6;
    if (!s.optimal() && !nearOptimal) throw SolveFailure(std::string("solver ") + statusName(s.status));
    return std::min(1.0, s.optimal() ? b.value : std::max(b.value, b.primalValue));
}

}  // namespace

CurveSample classicalPoint(const Certificate& cert, double q, const ClassicalSweepConfig& cfg, int* solves) {
    if (cfg.ladder.empty()) throw InputError("classical sweep needs at least one level");
    // At T the set {certificate = q} has no interior; {certificate >= T - delta} contains it
    // and still gives a valid upper bound.
    const double span = cert.quantumBound - cert.whiteNoise;
    const bool atTop = q >= cert.quantumBound - 1e-9 * span;
    const std::vector<DataSpec> data{atTop ? DataSpec{"certificate", cert.functional, Sense::AtLeast, cert.quantumBound - 1e-7 * span}
                                           : DataSpec{"certificate", cert.functional, Sense::Equal, q}};
    const int rungs = static_cast<int>(cfg.ladder.size());

    std::vector<GuessStrategy> strategies;
    std::function<MomentProblem(const GuessStrategy&, const LevelSpec&)> build;
    std::vector<int> reps;  // strategy indices actually solved
    if (cert.kind == CertKind::Bell) {
        const BellScenario s = bellScenarioFor(cert);
        strategies = enumerateGuessStrategies(s, cfg.xStar);
        build = [s, &cfg, &data](const GuessStrategy& g, const LevelSpec& spec) {
            return buildBellMomentProblem(s, spec, bellGuessForm(g, cfg.xStar), data);
        };
        reps.resize(strategies.size());
        std::iota(reps.begin(), reps.end(), 0);
    } else {
        const PmScenario s = pmScenarioFor(cert);
        strategies = enumerateGuessStrategies(s, cfg.yStar);
        build = [s, &cfg, &data](const GuessStrategy& g, const LevelSpec& spec) {
            return buildPmMomentProblem(s, cfg.dimension, spec, pmGuessForm(g, cfg.yStar, s.preparations), data);
        };
        if (cfg.useSymmetry) {
            const auto group = pmSymmetries(s, cert.functional);
            const int o = s.measurements[static_cast<std::size_t>(cfg.yStar)];
            // Strategy ids are mixed radix with the first preparation most significant.
            auto idOf = [&](const std::vector<int>& b) {
                int id = 0;
                for (int v : b) id = id * o + v;
                return id;
            };
            for (const auto& g : strategies) {
                int rep = g.id;
                for (const auto& r : group) {
                    std::vector<int> img(g.b.size());
                    for (std::size_t x = 0; x < g.b.size(); ++x)
                        img[static_cast<std::size_t>(r.prep[x])] =
                            r.outcome[static_cast<std::size_t>(cfg.yStar)][static_cast<std::size_t>(g.b[x])];
                    rep = std::min(rep, idOf(img));
                }
                if (rep == g.id) reps.push_back(g.id);
            }
        } else {
            reps.resize(strategies.size());
            std::iota(reps.begin(), reps.end(), 0);
        }
    }

    std::vector<double> gaps(reps.size(), 0.0);
    const BoundOracle oracle = [&](int i, int rung) {
        const auto& g = strategies[static_cast<std::size_t>(reps[static_cast<std::size_t>(i)])];
        const MomentProblem p = build(g, cfg.ladder[static_cast<std::size_t>(rung)]);
        const BoundResult b = maximize(p, cfg.solver);
        gaps[static_cast<std::size_t>(i)] = b.gap;
        return acceptedBound(b);
    };

    CurveSample out;
    out.q = q;
    out.level = cfg.ladder.back().str();
    try {
        const RefinementResult r = iterativeRefinement(static_cast<int>(reps.size()), rungs, oracle, cfg.workers);
        out.p = r.value;
        out.strategy = reps[static_cast<std::size_t>(r.best)];
        out.gap = gaps[static_cast<std::size_t>(r.best)];
        if (solves) *solves = r.solves;
    } catch (const InputError& e) {
        out.ok = false;
        out.warning = e.what();
    } catch (const SolveFailure& e) {
        out.ok = false;
        out.warning = e.what();
    }
    return out;
}

GuessingCurve pguessClassical(const Certificate& cert, const std::vector<double>& grid, const ClassicalSweepConfig& cfg) {
    for (double q : grid) {
        const double lo = std::min(cert.whiteNoise, cert.localBound.value_or(cert.whiteNoise));
        if (q < lo - 1e-12 || q > cert.quantumBound + 1e-9) throw InputError("grid point outside [W, T]");
    }
    GuessingCurve curve;
    curve.certificateId = cert.id;
    // Below the local bound a deterministic box reproduces q, so Eve guesses perfectly.
    if (grid.empty() || cert.whiteNoise < grid.front() - 1e-12) {
        CurveSample anchor;
        anchor.q = cert.whiteNoise;
        anchor.p = 1;
        anchor.level = "analytic";
        curve.samples.push_back(anchor);
    }
    for (double q : grid) {
        auto it = std::find_if(cfg.done.begin(), cfg.done.end(),
                               [q](const CurveSample& s) { return std::abs(s.q - q) <= 1e-12; });
        CurveSample s = it != cfg.done.end() ? *it : classicalPoint(cert, q, cfg);
        if (it == cfg.done.end() && cfg.onSample) cfg.onSample(s);
        curve.samples.push_back(std::move(s));
    }
    int ok = 0;
    for (const auto& s : curve.samples) ok += s.ok;
    if (ok >= 2) curve.rebuildEnvelope();
    return curve;
}

}  // namespace povmrand
