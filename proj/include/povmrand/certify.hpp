#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "povmrand/moment_problem.hpp"
#include "povmrand/sdp.hpp"

namespace povmrand {

// -log2 p; throws InputError for p <= 0 or p > 1 + 1e-9.
double minEntropy(double p);

struct AdversaryModel {
    enum class Kind { Quantum, Classical };
    enum class Knowledge { Revealed, Secret };
    Kind kind = Kind::Quantum;
    Knowledge setting = Knowledge::Revealed;
};

struct GuessResult {
    double p = 1;                // upper bound on the guessing probability
    double primal = 1;           // primal objective of the same solve
    double gap = 0;              // duality gap of the solve
    LevelSpec spec;
    int variables = 0;
    SdpSolution solution;
    std::optional<Certificate> dual;  // affine bound in the constrained statistics
};

// Eve guesses Alice's outcome for setting xStar and learns x afterwards.
// Throws InputError("infeasible ...") when the constraints admit no behavior.
GuessResult pguessQuantumLocal(const Fixture& fixture, int xStar, const LevelSpec& spec, ConstraintMode mode,
                               const SdpOptions& opts = {});
// Same with caller-supplied constraints (none gives the trivial bound 1).
GuessResult pguessQuantumLocal(const BellScenario& scenario, int xStar, const LevelSpec& spec,
                               const std::vector<DataSpec>& data, const SdpOptions& opts = {});

// Eve guesses Bob's outcome for setting yStar without knowing the preparation.
GuessResult pguessQuantumSecretPm(const Fixture& fixture, int yStar, int dimension, const LevelSpec& spec,
                                  const SdpOptions& opts = {});
GuessResult pguessQuantumSecretPm(const PmScenario& scenario, int yStar, int dimension, const LevelSpec& spec,
                                  const std::vector<DataSpec>& data, const SdpOptions& opts = {});

// Nieto-Silleras constraints pinning every event of a behavior (one outcome per setting
// is implied by normalization and left out).
std::vector<DataSpec> eventConstraints(const PmBehavior& p);
std::vector<DataSpec> eventConstraints(const BellBehavior& p);

// A deterministic guess: one guessed outcome per averaged round type.
struct GuessStrategy {
    int id = 0;
    std::vector<int> a;  // Bell: Alice's guess per Bob setting; empty for prepare-and-measure
    std::vector<int> b;  // Bell: Bob's guess per Bob setting; PM: Bob's guess per preparation
    std::string label() const;
};

// Bell global case: Alice's setting xStar is fixed and the guess covers every Bob setting.
std::vector<GuessStrategy> enumerateGuessStrategies(const BellScenario& scenario, int xStar);
// Prepare-and-measure case: one guess of Bob's outcome at yStar per preparation.
std::vector<GuessStrategy> enumerateGuessStrategies(const PmScenario& scenario, int yStar);
// Generic: every tuple in prod_i {0..counts[i]-1}, id in mixed radix with the first slot most significant.
std::vector<std::vector<int>> enumerateTuples(const std::vector<int>& counts);

// Success probability of a guess strategy as an event form.
EventForm bellGuessForm(const GuessStrategy& s, int xStar);
EventForm pmGuessForm(const GuessStrategy& s, int yStar, int preparations);

// ---------------------------------------------------------------------------
// Iterative refinement

// Upper bound for strategy `index` at ladder position `rung`.
using BoundOracle = std::function<double(int index, int rung)>;

struct RefinementResult {
    int best = -1;
    double value = 1;
    int solves = 0;
    std::vector<double> bound;  // per strategy, last computed bound (initially 1)
    std::vector<int> rung;      // per strategy, ladder positions solved (0 = none)
    std::vector<std::vector<double>> history;  // per strategy, bounds in solve order
};

// Keeps a bound per strategy (initially 1) and repeatedly refines the arg-max (lowest index on
// ties) by one rung until the arg-max has reached the last rung. `workers` > 1 evaluates the
// first rung of all strategies concurrently.
RefinementResult iterativeRefinement(int strategies, int rungs, const BoundOracle& oracle, int workers = 1);

// Solves every strategy at the last rung.
RefinementResult exhaustiveMaximum(int strategies, int rungs, const BoundOracle& oracle, int workers = 1);

// ---------------------------------------------------------------------------
// Convex envelope

class ConvexEnvelope {
public:
    ConvexEnvelope() = default;
    // Lower convex hull of (q, p) samples; needs at least two distinct q.
    explicit ConvexEnvelope(std::vector<std::pair<double, double>> samples);

    const std::vector<std::pair<double, double>>& vertices() const { return hull_; }
    double lo() const { return hull_.front().first; }
    double hi() const { return hull_.back().first; }
    // Linear interpolation between hull vertices; throws InputError outside [lo, hi].
    double operator()(double q) const;
    bool empty() const { return hull_.empty(); }

private:
    std::vector<std::pair<double, double>> hull_;
};

struct CurveSample {
    double q = 0;
    double p = 1;
    std::string level;
    int strategy = -1;
    double gap = 0;
    bool ok = true;
    std::string warning;
};

struct GuessingCurve {
    std::string certificateId;
    std::vector<CurveSample> samples;
    ConvexEnvelope envelope;

    void rebuildEnvelope();
    // CSV with columns q,pguess,min_entropy_bits,level,strategy_id.
    std::string csv(const std::string& headerComment = "") const;
};

// Grid of `points` values from the certificate's local bound (or W) to T, inclusive.
std::vector<double> certificateGrid(const Certificate& cert, int points);

// How each grid point of a classical sweep is solved.
struct ClassicalSweepConfig {
    std::vector<LevelSpec> ladder;  // iterative refinement rungs
    int workers = 1;
    SdpOptions solver;
    bool useSymmetry = true;   // prepare-and-measure: one solve per orbit of the preparation relabelings
    int dimension = 2;         // prepare-and-measure
    int xStar = 3;             // Bell: Alice's setting
    int yStar = 3;             // prepare-and-measure: Bob's setting
    // Called after every finished grid point (checkpointing).
    std::function<void(const CurveSample&)> onSample;
    // Grid points already known (resume): skipped when q matches within 1e-12.
    std::vector<CurveSample> done;
};

// Classical adversary: for each q, maximize every deterministic guess strategy subject to
// certificate == q over the Eve-free relaxation; the curve point is the maximum.
GuessingCurve pguessClassical(const Certificate& cert, const std::vector<double>& grid, const ClassicalSweepConfig& cfg);

// Maximum over strategies for one grid point (exposed for tests and benchmarks).
CurveSample classicalPoint(const Certificate& cert, double q, const ClassicalSweepConfig& cfg, int* solves = nullptr);

// Default ladders.
std::vector<LevelSpec> defaultBellClassicalLadder();
std::vector<LevelSpec> defaultPmClassicalLadder();
LevelSpec defaultBellQuantumSpec();
LevelSpec defaultPmQuantumSpec();

// Certificate value of the fixture under penalty weight k, then the pipeline bound.
struct SweepPoint {
    double k = 0;
    double q = 0;
    double p = 1;
    double gap = 0;
};
using SweepPipeline = std::function<SweepPoint(double k, double q)>;
std::vector<SweepPoint> sweepK(const Fixture& fixture, const std::vector<double>& kGrid, const SweepPipeline& pipeline);

// Built-in certificate by id ("chsh", "elegant", "reduced-qrac") with penalty weight k.
Certificate certificateById(const std::string& id, double k);

}  // namespace povmrand
