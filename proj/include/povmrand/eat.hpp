#pragma once

#include <string>
#include <utility>
#include <vector>

#include "povmrand/scenario.hpp"

namespace povmrand {

// Lower end and upper end of the relative certificate range used for D.
inline const double kEtaRangeLo = -1.0 - 1.7320508075688772 / 12.0;
inline const double kEtaRangeHi = 1.7320508075688772;

// (beta ln2 / 2) [log2(129) + sqrt(D^2/gamma + 2)]^2
double epsilonV(double beta, double gamma, double D);
// beta^2 2^(beta (3 + D)) / (6 (1 - beta)^3 ln2) [ln2 (2 + D) + 2]^3
double epsilonK(double beta, double D);
// (1 - log2(pOmega epsS)) / beta
double epsilonOmega(double beta, double pOmega, double epsS);

// Affine min-tradeoff function f(eta) = slope * eta + intercept.
struct MinTradeoff {
    double slope = 0;
    double intercept = 0;
    double eta0 = 0;
    double D = 0;  // f(hi) - f(lo) over the relative certificate range

    double operator()(double eta) const { return slope * eta + intercept; }
    static MinTradeoff fromLine(double slope, double intercept, double eta0 = 0);
};

// Samples (eta, min-entropy bits) of a certified curve, sorted by eta.
struct EntropyCurve {
    std::vector<std::pair<double, double>> points;

    // Linear interpolation; throws InputError outside the sampled range.
    double operator()(double eta) const;
};

// Parses {"points": [{"eta": .., "min_entropy_bits": ..}, ...]}; points are sorted by eta.
EntropyCurve parseEntropyCurve(const std::string& jsonText);
// A frozen curve compiled into the library (default: elegant, k = 1, quantum adversary).
EntropyCurve computedEntropyCurve(const std::string& name = "elegant-k1-quantum");
std::vector<std::string> computedCurveNames();

// Forward difference at eta0 with the given step; both points must lie in the sampled range.
MinTradeoff minTradeoffFromCurve(const EntropyCurve& curve, double eta0 = 0.993, double step = 1e-3);

struct EatParams {
    double beta = 2e-8;
    double gamma = 4e-4;
    double pOmega = 0.997;
    double epsS = 3.09e-12;
    double rounds = 1e10;
    double eventRate = 2.5e6;  // events per second
    double eta = 0.9962;
    double etaSigma = 0.001;

    double etaThreshold() const { return eta - 3 * etaSigma; }
    void validate() const;  // throws InputError
};

struct CertifiedEntropy {
    double total = 0;     // bits over the whole run, clamped at 0
    double perEvent = 0;  // total / rounds
    bool certified = true;  // false when the unclamped value was negative
    double epsV = 0, epsK = 0, epsOmega = 0;
    double fAtThreshold = 0;
};

CertifiedEntropy certifiedEntropy(const EatParams& params, const MinTradeoff& f);

// 4 gamma + H2(gamma)
double consumptionRate(double gamma);
double binaryEntropy(double p);

struct NetRate {
    double grossPerEvent = 0;
    double consumption = 0;
    double netPerEvent = 0;
    double bitsPerSecond = 0;
    double ratio = 0;  // consumption / gross
    bool expanding = true;
    CertifiedEntropy entropy;
};

NetRate netRate(const EatParams& params, const MinTradeoff& f);

// The three literature rows verbatim plus this artifact's row recomputed from netRate.
std::vector<ProtocolRow> compareProtocols(const EatParams& params, const MinTradeoff& f);

}  // namespace povmrand
