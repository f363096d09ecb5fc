#include "povmrand/eat.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace povmrand {

namespace {

struct EmbeddedCurve {
    const char* name;
    const char* text;
};

const EmbeddedCurve kCurves[] = {
#include "povmrand/curve_data.inc"
    {nullptr, nullptr},
};

void requireOpenUnit(double v, const char* name) {
    if (!(v > 0 && v < 1)) throw InputError(std::string(name) + " must lie in (0, 1)");
}

}  // namespace

double epsilonV(double beta, double gamma, double D) {
    requireOpenUnit(beta, "beta");
    requireOpenUnit(gamma, "gamma");
    if (!(D > 0)) throw InputError("D must be positive");
    const double t = std::log2(129.0) + std::sqrt(D * D / gamma + 2);
    return beta * std::log(2.0) / 2 * t * t;
}

double epsilonK(double beta, double D) {
    requireOpenUnit(beta, "beta");
    if (!(D > 0)) throw InputError("D must be positive");
    const double ln2 = std::log(2.0);
    const double t = ln2 * (2 + D) + 2;
    return beta * beta * std::exp2(beta * (3 + D)) / (6 * std::pow(1 - beta, 3) * ln2) * t * t * t;
}

double epsilonOmega(double beta, double pOmega, double epsS) {
    requireOpenUnit(beta, "beta");
    if (!(pOmega > 0 && pOmega <= 1)) throw InputError("p_Omega must lie in (0, 1]");
    requireOpenUnit(epsS, "eps_S");
    return (1 - std::log2(pOmega * epsS)) / beta;
}

MinTradeoff MinTradeoff::fromLine(double slope, double intercept, double eta0) {
    MinTradeoff f;
    f.slope = slope;
    f.intercept = intercept;
    f.eta0 = eta0;
    f.D = f(kEtaRangeHi) - f(kEtaRangeLo);
    return f;
}

double EntropyCurve::operator()(double eta) const {
    if (points.size() < 2) throw InputError("entropy curve needs at least two points");
    const double tol = 1e-12;
    if (eta < points.front().first - tol || eta > points.back().first + tol)
        throw InputError("entropy curve evaluated outside its sampled range");
    if (eta <= points.front().first) return points.front().second;
    if (eta >= points.back().first) return points.back().second;
    auto it = std::upper_bound(points.begin(), points.end(), eta,
                               [](double v, const std::pair<double, double>& p) { return v < p.first; });
    const auto& b = *it;
    const auto& a = *(it - 1);
    return a.second + (eta - a.first) / (b.first - a.first) * (b.second - a.second);
}

EntropyCurve parseEntropyCurve(const std::string& jsonText) {
    EntropyCurve c;
    try {
        const auto j = nlohmann::json::parse(jsonText);
        for (const auto& pt : j.at("points")) c.points.emplace_back(pt.at("eta").get<double>(), pt.at("min_entropy_bits").get<double>());
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("malformed entropy curve: ") + e.what());
    }
    std::sort(c.points.begin(), c.points.end());
    return c;
}

EntropyCurve computedEntropyCurve(const std::string& name) {
    for (const auto& e : kCurves)
        if (e.name && name == e.name) return parseEntropyCurve(e.text);
    throw InputError("no computed curve named '" + name + "'");
}

std::vector<std::string> computedCurveNames() {
    std::vector<std::string> out;
    for (const auto& e : kCurves)
        if (e.name) out.emplace_back(e.name);
    return out;
}

MinTradeoff minTradeoffFromCurve(const EntropyCurve& curve, double eta0, double step) {
    if (!(step > 0)) throw InputError("difference step must be positive");
    const double h0 = curve(eta0);
    const double h1 = curve(eta0 + step);
    const double slope = (h1 - h0) / step;
    MinTradeoff f = MinTradeoff::fromLine(slope, h0 - slope * eta0, eta0);
    if (!(f.D > 0)) throw InputError("min-tradeoff range D is not positive (curve must increase with eta)");
    return f;
}

void EatParams::validate() const {
    requireOpenUnit(beta, "beta");
    requireOpenUnit(gamma, "gamma");
    if (!(pOmega > 0 && pOmega <= 1)) throw InputError("p_Omega must lie in (0, 1]");
    requireOpenUnit(epsS, "eps_S");
    if (!(rounds >= 1)) throw InputError("rounds must be at least 1");
    if (!(eventRate > 0)) throw InputError("event rate must be positive");
    if (!(etaSigma >= 0)) throw InputError("eta sigma must be non-negative");
}

CertifiedEntropy certifiedEntropy(const EatParams& params, const MinTradeoff& f) {
    params.validate();
    CertifiedEntropy c;
    c.epsV = epsilonV(params.beta, params.gamma, f.D);
    c.epsK = epsilonK(params.beta, f.D);
    c.epsOmega = epsilonOmega(params.beta, params.pOmega, params.epsS);
    c.fAtThreshold = f(params.etaThreshold());
    const double n = params.rounds;
    const double total = n * c.fAtThreshold - n * (c.epsV + c.epsK) - c.epsOmega;
    c.certified = total > 0;
    c.total = std::max(0.0, total);
    c.perEvent = c.total / n;
    return c;
}

double binaryEntropy(double p) {
    if (!(p >= 0 && p <= 1)) throw InputError("binary entropy needs p in [0, 1]");
    if (p == 0 || p == 1) return 0;
    return -p * std::log2(p) - (1 - p) * std::log2(1 - p);
}

double consumptionRate(double gamma) {
    requireOpenUnit(gamma, "gamma");
    return 4 * gamma + binaryEntropy(gamma);
}

NetRate netRate(const EatParams& params, const MinTradeoff& f) {
    NetRate r;
    r.entropy = certifiedEntropy(params, f);
    r.grossPerEvent = r.entropy.perEvent;
    r.consumption = consumptionRate(params.gamma);
    r.netPerEvent = r.grossPerEvent - r.consumption;
    r.bitsPerSecond = r.netPerEvent * params.eventRate;
    r.ratio = r.grossPerEvent > 0 ? r.consumption / r.grossPerEvent : INFINITY;
    r.expanding = r.netPerEvent > 0;
    return r;
}

std::vector<ProtocolRow> compareProtocols(const EatParams& params, const MinTradeoff& f) {
    std::vector<ProtocolRow> rows = publishedProtocolRows();
    if (rows.empty()) throw InputError("protocol table is empty");
    const NetRate r = netRate(params, f);
    ProtocolRow& own = rows.back();
    own.eventRateHz = params.eventRate;
    own.bitRate = r.bitsPerSecond;
    own.bitRateOverEventRate = r.bitsPerSecond / params.eventRate;
    return rows;
}

}  // namespace povmrand
