#include "povmrand/scenario.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

namespace povmrand {

BellScenario::BellScenario(std::vector<std::vector<int>> outcomes) : outcomes_(std::move(outcomes)) {
    if (outcomes_.size() < 2 || outcomes_.size() > 3)
        throw InputError("Bell scenario needs 2 or 3 parties");
    for (const auto& party : outcomes_) {
        if (party.empty()) throw InputError("every party needs at least one setting");
        for (int o : party)
            if (o < 2) throw InputError("every setting needs at least 2 outcomes");
    }
}

BellScenario BellScenario::withoutEve() const {
    return BellScenario({outcomes_[0], outcomes_[1]});
}

BellScenario BellScenario::withEve(std::vector<int> eveOutcomes) const {
    return BellScenario({outcomes_[0], outcomes_[1], std::move(eveOutcomes)});
}

void PmScenario::validate() const {
    if (dimension < 2) throw InputError("prepare-and-measure dimension must be at least 2");
    if (preparations < 1) throw InputError("at least one preparation is required");
    if (measurements.empty()) throw InputError("at least one measurement is required");
    for (int o : measurements)
        if (o < 2) throw InputError("every measurement needs at least 2 outcomes");
}

BellScenario chshScenario() { return BellScenario({{2, 2}, {2, 2}}); }

BellScenario elegantScenario() { return BellScenario({{2, 2, 2, 4}, {2, 2, 2, 2}}); }

PmScenario reducedQracScenario() { return PmScenario{4, 2, {2, 2, 2, 4}}; }

PmScenario racScenario(int m, int d) {
    if (m < 1 || d < 2) throw InputError("RAC needs m >= 1 and d >= 2");
    int n = 1;
    for (int i = 0; i < m; ++i) n *= d;
    return PmScenario{n, d, std::vector<int>(m, d)};
}

// ---------------------------------------------------------------------------

BellBehavior::BellBehavior(BellScenario scenario) : scenario_(std::move(scenario)) {
    std::size_t off = 0;
    for (int x = 0; x < scenario_.settings(0); ++x)
        for (int y = 0; y < scenario_.settings(1); ++y) {
            offsets_.push_back(off);
            off += static_cast<std::size_t>(scenario_.outcomes(0, x) * scenario_.outcomes(1, y));
        }
    data_.assign(off, 0.0);
}

std::size_t BellBehavior::index(int a, int b, int x, int y) const {
    if (x < 0 || x >= scenario_.settings(0) || y < 0 || y >= scenario_.settings(1))
        throw InputError("setting out of range");
    const int na = scenario_.outcomes(0, x), nb = scenario_.outcomes(1, y);
    if (a < 0 || a >= na || b < 0 || b >= nb) throw InputError("outcome out of range");
    return offsets_[static_cast<std::size_t>(x * scenario_.settings(1) + y)] +
           static_cast<std::size_t>(a * nb + b);
}

void BellBehavior::validate(double tol) const {
    const auto& s = scenario_;
    for (double v : data_)
        if (v < -tol || v > 1 + tol) throw InputError("behavior entry outside [0,1]");
    for (int x = 0; x < s.settings(0); ++x)
        for (int y = 0; y < s.settings(1); ++y) {
            double total = 0;
            for (int a = 0; a < s.outcomes(0, x); ++a)
                for (int b = 0; b < s.outcomes(1, y); ++b) total += (*this)(a, b, x, y);
            if (std::abs(total - 1) > tol) {
                std::ostringstream os;
                os << "behavior not normalized at (x,y)=(" << x << "," << y << "): " << total;
                throw InputError(os.str());
            }
        }
    // Alice's marginal independent of y, Bob's of x.
    for (int x = 0; x < s.settings(0); ++x)
        for (int a = 0; a < s.outcomes(0, x); ++a) {
            double ref = 0;
            for (int y = 0; y < s.settings(1); ++y) {
                double m = 0;
                for (int b = 0; b < s.outcomes(1, y); ++b) m += (*this)(a, b, x, y);
                if (y == 0) ref = m;
                else if (std::abs(m - ref) > tol) throw InputError("behavior violates no-signaling (Alice)");
            }
        }
    for (int y = 0; y < s.settings(1); ++y)
        for (int b = 0; b < s.outcomes(1, y); ++b) {
            double ref = 0;
            for (int x = 0; x < s.settings(0); ++x) {
                double m = 0;
                for (int a = 0; a < s.outcomes(0, x); ++a) m += (*this)(a, b, x, y);
                if (x == 0) ref = m;
                else if (std::abs(m - ref) > tol) throw InputError("behavior violates no-signaling (Bob)");
            }
        }
}

BellBehavior BellBehavior::uniform(const BellScenario& scenario) {
    BellBehavior p(scenario.withoutEve());
    const auto& s = p.scenario_;
    for (int x = 0; x < s.settings(0); ++x)
        for (int y = 0; y < s.settings(1); ++y) {
            const double v = 1.0 / (s.outcomes(0, x) * s.outcomes(1, y));
            for (int a = 0; a < s.outcomes(0, x); ++a)
                for (int b = 0; b < s.outcomes(1, y); ++b) p.at(a, b, x, y) = v;
        }
    return p;
}

BellBehavior BellBehavior::mix(const BellBehavior& other, double w) const {
    if (!(other.scenario_ == scenario_)) throw InputError("mixing behaviors of different scenarios");
    BellBehavior r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = w * data_[i] + (1 - w) * other.data_[i];
    return r;
}

// ---------------------------------------------------------------------------

PmBehavior::PmBehavior(PmScenario scenario) : scenario_(std::move(scenario)) {
    scenario_.validate();
    std::size_t off = 0;
    for (int x = 0; x < scenario_.preparations; ++x)
        for (int o : scenario_.measurements) {
            offsets_.push_back(off);
            off += static_cast<std::size_t>(o);
        }
    data_.assign(off, 0.0);
}

std::size_t PmBehavior::index(int b, int x, int y) const {
    const int ny = static_cast<int>(scenario_.measurements.size());
    if (x < 0 || x >= scenario_.preparations || y < 0 || y >= ny) throw InputError("setting out of range");
    if (b < 0 || b >= scenario_.measurements[static_cast<std::size_t>(y)])
        throw InputError("outcome out of range");
    return offsets_[static_cast<std::size_t>(x * ny + y)] + static_cast<std::size_t>(b);
}

void PmBehavior::validate(double tol) const {
    for (double v : data_)
        if (v < -tol || v > 1 + tol) throw InputError("behavior entry outside [0,1]");
    const int ny = static_cast<int>(scenario_.measurements.size());
    for (int x = 0; x < scenario_.preparations; ++x)
        for (int y = 0; y < ny; ++y) {
            double total = 0;
            for (int b = 0; b < scenario_.measurements[static_cast<std::size_t>(y)]; ++b) total += (*this)(b, x, y);
            if (std::abs(total - 1) > tol) throw InputError("behavior not normalized");
        }
}

PmBehavior PmBehavior::uniform(const PmScenario& scenario) {
    PmBehavior p(scenario);
    const int ny = static_cast<int>(scenario.measurements.size());
    for (int x = 0; x < scenario.preparations; ++x)
        for (int y = 0; y < ny; ++y) {
            const int nb = scenario.measurements[static_cast<std::size_t>(y)];
            for (int b = 0; b < nb; ++b) p.at(b, x, y) = 1.0 / nb;
        }
    return p;
}

PmBehavior PmBehavior::mix(const PmBehavior& other, double w) const {
    if (!(other.scenario_ == scenario_)) throw InputError("mixing behaviors of different scenarios");
    PmBehavior r = *this;
    for (std::size_t i = 0; i < data_.size(); ++i) r.data_[i] = w * data_[i] + (1 - w) * other.data_[i];
    return r;
}

// ---------------------------------------------------------------------------

double Functional::evaluate(const BellBehavior& p) const {
    double v = constant;
    for (const auto& t : terms) v += t.weight * p.prob(t.event);
    return v;
}

double Functional::evaluate(const PmBehavior& p) const {
    double v = constant;
    for (const auto& t : terms) v += t.weight * p.prob(t.event);
    return v;
}

Functional& Functional::add(const Event& e, double w) {
    for (auto& t : terms)
        if (t.event == e) {
            t.weight += w;
            return *this;
        }
    terms.push_back({e, w});
    return *this;
}

Functional& Functional::addCorrelator(int x, int y, double w) {
    add({0, 0, x, y}, w);
    add({1, 1, x, y}, w);
    add({0, 1, x, y}, -w);
    add({1, 0, x, y}, -w);
    return *this;
}

Functional Functional::scaled(double s) const {
    Functional f = *this;
    f.constant *= s;
    for (auto& t : f.terms) t.weight *= s;
    return f;
}

Functional Functional::operator+(const Functional& o) const {
    Functional f = *this;
    f.constant += o.constant;
    for (const auto& t : o.terms) f.add(t.event, t.weight);
    return f;
}

// ---------------------------------------------------------------------------

Certificate chshCertificate() {
    Certificate c;
    c.id = "chsh";
    c.kind = CertKind::Bell;
    c.functional.addCorrelator(0, 0, 1).addCorrelator(0, 1, 1).addCorrelator(1, 0, 1).addCorrelator(1, 1, -1);
    c.quantumBound = 2 * std::sqrt(2.0);
    c.whiteNoise = 0;
    c.localBound = 2;
    return c;
}

namespace {
// Signs of <A_x B_y> in the elegant Bell operator, rows x = 0..2, columns y = 0..3.
constexpr int kElegantSigns[3][4] = {{1, 1, -1, -1}, {1, -1, 1, -1}, {1, -1, -1, 1}};
}  // namespace

Certificate elegantCertificate(double k) {
    if (k < 0) throw InputError("penalty weight k must be non-negative");
    Certificate c;
    c.id = "elegant";
    c.kind = CertKind::Bell;
    c.penaltyK = k;
    for (int x = 0; x < 3; ++x)
        for (int y = 0; y < 4; ++y) c.functional.addCorrelator(x, y, kElegantSigns[x][y]);
    // POVM setting x = 3, Bob's "+1" outcome is index 0.
    if (k != 0)
        for (int i = 0; i < 4; ++i) c.functional.add({i, 0, 3, i}, -k);
    c.quantumBound = 4 * std::sqrt(3.0);
    c.whiteNoise = -k / 2;
    c.localBound = 6;
    return c;
}

const std::vector<std::array<int, 3>>& reducedQracStrings() {
    static const std::vector<std::array<int, 3>> strings = {{0, 0, 0}, {0, 1, 1}, {1, 0, 1}, {1, 1, 0}};
    return strings;
}

Certificate reducedQracCertificate(double k) {
    if (k < 0) throw InputError("penalty weight k must be non-negative");
    Certificate c;
    c.id = "reduced-qrac";
    c.kind = CertKind::PrepareMeasure;
    c.penaltyK = k;
    const auto& strings = reducedQracStrings();
    for (int x = 0; x < 4; ++x)
        for (int y = 0; y < 3; ++y) c.functional.add({-1, strings[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)], x, y}, 1.0 / 12);
    if (k != 0)
        for (int i = 0; i < 4; ++i) c.functional.add({-1, i, i, 3}, -k);
    c.quantumBound = 0.5 * (1 + std::sqrt(3.0) / 3);
    c.whiteNoise = 0.5 - k / 4;
    c.localBound = 0.75;
    return c;
}

Certificate racCertificate(int m, int d) {
    const PmScenario s = racScenario(m, d);
    Certificate c;
    c.id = "rac";
    c.kind = CertKind::PrepareMeasure;
    const double w = 1.0 / (m * s.preparations);
    for (int x = 0; x < s.preparations; ++x) {
        int rest = x;
        std::vector<int> digits(static_cast<std::size_t>(m));
        for (int i = m - 1; i >= 0; --i) {
            digits[static_cast<std::size_t>(i)] = rest % d;
            rest /= d;
        }
        for (int y = 0; y < m; ++y) c.functional.add({-1, digits[static_cast<std::size_t>(y)], x, y}, w);
    }
    c.quantumBound = (m == 2 && d == 2) ? 0.5 * (1 + 1 / std::sqrt(2.0)) : 1.0;
    c.whiteNoise = 1.0 / d;
    return c;
}

double correlator(const BellBehavior& p, int x, int y) {
    const auto& s = p.scenario();
    if (x < 0 || x >= s.settings(0) || y < 0 || y >= s.settings(1)) throw InputError("setting out of range");
    if (s.outcomes(0, x) != 2 || s.outcomes(1, y) != 2) throw InputError("correlator needs binary outcomes");
    return p(0, 0, x, y) + p(1, 1, x, y) - p(0, 1, x, y) - p(1, 0, x, y);
}

double qracSuccess(const PmBehavior& p, int m, int d) {
    const PmScenario expect = racScenario(m, d);
    const auto& s = p.scenario();
    if (s.preparations != expect.preparations || static_cast<int>(s.measurements.size()) < m)
        throw InputError("behavior does not cover all d^m preparations and m settings");
    for (int y = 0; y < m; ++y)
        if (s.measurements[static_cast<std::size_t>(y)] < d) throw InputError("measurement with fewer than d outcomes");
    return racCertificate(m, d).functional.evaluate(p);
}

double relativeValue(double q, const Certificate& cert) {
    if (cert.quantumBound == cert.whiteNoise) throw InputError("degenerate certificate: T == W");
    return (q - cert.whiteNoise) / (cert.quantumBound - cert.whiteNoise);
}

}  // namespace povmrand
