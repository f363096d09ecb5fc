#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "povmrand/scenario.hpp"

namespace povmrand {

using cplx = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;

// (M + M^dagger) / 2
CMat hermitianPart(const CMat& m);
CMat kron(const CMat& a, const CMat& b);
CMat pauli(int i);  // 0 = identity, 1..3 = x, y, z
// (I + n.sigma) * scale
CMat blochOperator(const Eigen::Vector3d& n, double scale = 0.5);
Eigen::Vector3d blochVector(const CMat& twoByTwo);
// Partial trace over the second factor of a (da*db)-dimensional operator.
CMat partialTraceB(const CMat& m, int da, int db);
// Partial trace over the first factor.
CMat partialTraceA(const CMat& m, int da, int db);
// Inverse square root of a Hermitian positive definite matrix.
CMat invSqrtPsd(const CMat& m);

struct QState {
    CMat rho;

    int dim() const { return static_cast<int>(rho.rows()); }
    void validate() const;  // throws InputError
    static QState pure(const CVec& psi);
    static QState maximallyMixed(int d);
};

struct Measurement {
    std::vector<CMat> effects;

    int outcomes() const { return static_cast<int>(effects.size()); }
    int dim() const { return effects.empty() ? 0 : static_cast<int>(effects.front().rows()); }
    void validate() const;
    // Binary projective measurement of the observable n.sigma; outcome 0 is the +1 eigenvalue.
    static Measurement observable(const Eigen::Vector3d& n);
};

// Tr(rho E), clamped to [0,1]. Throws on dimension mismatch.
double born(const QState& state, const CMat& effect);

// The four-outcome tetrahedral qubit POVM.
Measurement tetrahedralPovm();

struct BellStrategy {
    QState state;  // on C^da (x) C^db
    int da = 2, db = 2;
    std::vector<Measurement> alice, bob;

    void validate() const;
    BellBehavior behavior() const;
    BellScenario scenario() const;
};

struct PmStrategy {
    std::vector<QState> states;
    std::vector<Measurement> measurements;

    void validate() const;
    PmBehavior behavior() const;
    PmScenario scenario() const;
};

BellStrategy idealElegantStrategy();
PmStrategy idealQracStrategy();

struct SeesawOptions {
    int restarts = 20;
    int maxIterations = 500;
    double tolerance = 1e-10;  // stop when an iteration improves by less
    std::uint64_t seed = 12345;
};

template <class S>
struct SeesawResult {
    S strategy;
    double value = 0;
    bool converged = false;
    std::vector<double> history;  // objective after every single-party update, best restart
};

// Maximizes a linear functional over qubit (or dim-level) strategies by alternating
// single-party optimizations. The returned value is attained by the returned strategy.
SeesawResult<BellStrategy> seesawBell(const BellScenario& scenario, const Functional& objective, int dim,
                                      const SeesawOptions& opts = {});
SeesawResult<PmStrategy> seesawPm(const PmScenario& scenario, const Functional& objective,
                                  const SeesawOptions& opts = {});

// Maximizes sum_b tr(M_b C_b) over POVMs {M_b} (C_b Hermitian), solved as a small SDP.
Measurement optimalPovm(const std::vector<CMat>& c);

std::string strategyToJson(const BellStrategy& s);
std::string strategyToJson(const PmStrategy& s);
BellStrategy bellStrategyFromJson(const std::string& text);
PmStrategy pmStrategyFromJson(const std::string& text);

}  // namespace povmrand
