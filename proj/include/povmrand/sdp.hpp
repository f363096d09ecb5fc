#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "povmrand/moment_problem.hpp"
#include "povmrand/scenario.hpp"

namespace povmrand {

// One upper-triangle nonzero (0-based, i <= j) of a constraint matrix.
struct SdpEntry {
    int block = 0;
    int i = 0, j = 0;
    double value = 0;
    bool operator==(const SdpEntry&) const = default;
};

// Standard form: minimize c^T x subject to F(x) = F0 + sum_i x_i F_i >= 0.
// Negative block sizes denote diagonal blocks.
struct SdpInstance {
    std::vector<int> blockSizes;
    std::vector<double> c;
    std::vector<std::vector<SdpEntry>> F;  // F[0] = F0, F[i] for i = 1..m

    int m() const { return static_cast<int>(c.size()); }
    int totalDimension() const;
    void validate() const;  // throws InputError
    bool operator==(const SdpInstance&) const = default;
};

// Block-diagonal symmetric matrix; diagonal blocks are stored as vectors.
struct BlockMatrix {
    std::vector<Eigen::MatrixXd> dense;  // empty matrix for diagonal blocks
    std::vector<Eigen::VectorXd> diag;   // empty vector for dense blocks

    static BlockMatrix zeros(const std::vector<int>& sizes);
    static BlockMatrix identity(const std::vector<int>& sizes, double scale = 1);
    double trace() const;
    double dot(const BlockMatrix& o) const;  // Tr(this * o)
    double maxAbs() const;
    double minEigenvalue() const;
    void axpy(double a, const BlockMatrix& x);  // this += a x
    void addEntries(const std::vector<SdpEntry>& entries, double scale);
};

enum class SdpStatus { Optimal, MaxIterations, Infeasible, NumericalFailure };
const char* statusName(SdpStatus s);

struct SdpOptions {
    double gapTolerance = 1e-8;
    double feasibilityTolerance = 1e-8;
    int maxIterations = 200;
    bool parallelSchur = true;
    double stepFraction = 0.95;
};

struct IterationRecord {
    int iteration = 0;
    double primalObjective = 0;
    double dualObjective = 0;
    double relativeGap = 0;
    double primalInfeasibility = 0;
    double dualInfeasibility = 0;
    double mu = 0;
    double stepPrimal = 0, stepDual = 0;
};

struct SdpSolution {
    SdpStatus status = SdpStatus::NumericalFailure;
    std::vector<double> x;
    BlockMatrix S, Z;
    double primalObjective = 0;  // c^T x
    double dualObjective = 0;    // -Tr(F0 Z)
    double gap = 0;              // primal - dual
    double relativeGap = 0;
    double primalInfeasibility = 0;
    double dualInfeasibility = 0;
    int iterations = 0;
    bool unbounded = false;  // infeasible because the primal objective diverges to -infinity
    std::vector<IterationRecord> log;

    bool optimal() const { return status == SdpStatus::Optimal; }
};

SdpSolution solveSdp(const SdpInstance& inst, const SdpOptions& opts = {});

// Schur complement M_ij = Tr(F_i B F_j Z) for symmetric B, Z. The sparse kernel gives bitwise
// identical results with and without threads; schurComplementSerial is a dense reference.
Eigen::MatrixXd schurComplement(const SdpInstance& inst, const BlockMatrix& B, const BlockMatrix& Z, bool parallel);
Eigen::MatrixXd schurComplementSerial(const SdpInstance& inst, const BlockMatrix& B, const BlockMatrix& Z);

// Moment problem compiled to standard form. Equality constraints are eliminated by substitution.
struct CompiledProblem {
    SdpInstance sdp;
    std::vector<Affine> momentExpr;  // moment variable -> affine in SDP variables
    double objectiveConstant = 0;    // maximized objective = objectiveConstant - c^T x
    int dataBlock = -1;              // diagonal block holding inequality slacks, -1 if none
    std::vector<int> dataRow;        // per data constraint: row in dataBlock, -1 for equalities
    std::vector<int> psdBlockOf;     // moment problem block -> SDP block

    std::vector<double> moments(const std::vector<double>& x) const;
    double objectiveValue(double primalObjective) const { return objectiveConstant - primalObjective; }
};

// Throws InputError("infeasible ...") if the equality constraints are inconsistent.
CompiledProblem compile(const MomentProblem& problem);

// Sparse SDP interchange text (SDPA sign convention: sum_i x_i F_i - F0 >= 0).
std::string exportInterchange(const SdpInstance& inst);
SdpInstance importInterchange(const std::string& text);

// Upper bound solution of a maximization moment problem.
struct BoundResult {
    double value = 0;       // dual objective mapped to the maximization (valid upper bound when optimal)
    double primalValue = 0; // primal objective mapped to the maximization
    double gap = 0;
    SdpSolution solution;
    bool optimal() const { return solution.optimal(); }
};
BoundResult maximize(const MomentProblem& problem, const SdpOptions& opts = {});
BoundResult maximize(const MomentProblem& problem, const CompiledProblem& compiled, const SdpOptions& opts = {});

// Affine function of the constrained statistics, valid as an upper bound on the
// objective for every behavior in the relaxation.
Certificate dualCertificate(const SdpSolution& solution, const MomentProblem& problem, const CompiledProblem& compiled);

}  // namespace povmrand
