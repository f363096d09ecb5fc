#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace povmrand {

// Raised on violated preconditions of user-facing inputs (bad settings,
// malformed configuration, unknown names).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Absolute tolerance for normalization, positivity and no-signaling checks.
inline constexpr double kBehaviorTol = 1e-9;

// Parties are 0 = Alice, 1 = Bob, 2 = Eve (optional).
class BellScenario {
public:
    explicit BellScenario(std::vector<std::vector<int>> outcomes);

    int parties() const { return static_cast<int>(outcomes_.size()); }
    int settings(int party) const { return static_cast<int>(outcomes_.at(party).size()); }
    int outcomes(int party, int setting) const { return outcomes_.at(party).at(setting); }
    const std::vector<std::vector<int>>& table() const { return outcomes_; }

    // Same scenario restricted to Alice and Bob.
    BellScenario withoutEve() const;
    BellScenario withEve(std::vector<int> eveOutcomes) const;

    bool operator==(const BellScenario&) const = default;

private:
    std::vector<std::vector<int>> outcomes_;
};

struct PmScenario {
    int preparations = 0;
    int dimension = 2;
    std::vector<int> measurements;  // outcome count per setting

    void validate() const;
    bool operator==(const PmScenario&) const = default;
};

// CHSH: two binary settings per party.
BellScenario chshScenario();
// Alice: three binary settings plus one four-outcome setting; Bob: four binary settings.
BellScenario elegantScenario();
// Four preparations, three binary measurements plus one four-outcome measurement, qubit.
PmScenario reducedQracScenario();
// m^d -> 1 random access code: d^m preparations, m measurements with d outcomes.
PmScenario racScenario(int m, int d);

// A behavior entry. Bell form: P(a,b|x,y). Prepare-and-measure form: P(b|x,y), a = -1.
struct Event {
    int a = -1;
    int b = 0;
    int x = 0;
    int y = 0;
    auto operator<=>(const Event&) const = default;
};

class BellBehavior {
public:
    explicit BellBehavior(BellScenario scenario);

    const BellScenario& scenario() const { return scenario_; }
    double operator()(int a, int b, int x, int y) const { return data_[index(a, b, x, y)]; }
    double& at(int a, int b, int x, int y) { return data_[index(a, b, x, y)]; }
    double prob(const Event& e) const { return (*this)(e.a, e.b, e.x, e.y); }

    // Throws InputError describing the first violated invariant.
    void validate(double tol = kBehaviorTol) const;
    static BellBehavior uniform(const BellScenario& scenario);
    // Convex combination w*this + (1-w)*other.
    BellBehavior mix(const BellBehavior& other, double w) const;

private:
    std::size_t index(int a, int b, int x, int y) const;

    BellScenario scenario_;
    std::vector<std::size_t> offsets_;  // per (x,y)
    std::vector<double> data_;
};

class PmBehavior {
public:
    explicit PmBehavior(PmScenario scenario);

    const PmScenario& scenario() const { return scenario_; }
    double operator()(int b, int x, int y) const { return data_[index(b, x, y)]; }
    double& at(int b, int x, int y) { return data_[index(b, x, y)]; }
    double prob(const Event& e) const { return (*this)(e.b, e.x, e.y); }

    void validate(double tol = kBehaviorTol) const;
    static PmBehavior uniform(const PmScenario& scenario);
    PmBehavior mix(const PmBehavior& other, double w) const;

private:
    std::size_t index(int b, int x, int y) const;

    PmScenario scenario_;
    std::vector<std::size_t> offsets_;
    std::vector<double> data_;
};

// Linear functional on behavior entries.
struct Functional {
    struct Term {
        Event event;
        double weight = 0;
    };
    std::vector<Term> terms;
    double constant = 0;

    double evaluate(const BellBehavior& p) const;
    double evaluate(const PmBehavior& p) const;
    Functional& add(const Event& e, double w);
    Functional& addCorrelator(int x, int y, double w);  // binary settings only
    Functional scaled(double s) const;
    Functional operator+(const Functional& o) const;
};

enum class CertKind { Bell, PrepareMeasure };

struct Certificate {
    std::string id;
    CertKind kind = CertKind::Bell;
    Functional functional;
    double penaltyK = 0;
    double quantumBound = 0;  // T
    double whiteNoise = 0;    // W
    std::optional<double> localBound;

    double evaluate(const BellBehavior& p) const { return functional.evaluate(p); }
    double evaluate(const PmBehavior& p) const { return functional.evaluate(p); }
};

Certificate chshCertificate();
// Elegant Bell operator minus k times the four POVM penalty probabilities.
Certificate elegantCertificate(double k);
// Reduced 3->1 QRAC success minus k times the four POVM penalty probabilities.
Certificate reducedQracCertificate(double k);
// Plain m^d -> 1 RAC success probability as a certificate (no penalty).
Certificate racCertificate(int m, int d);

// Correlator <A_x B_y> for binary settings; throws on bad settings.
double correlator(const BellBehavior& p, int x, int y);
// Average success probability of an m^d -> 1 (Q)RAC; preparation index encodes
// the string x_1..x_m in base d with x_1 most significant.
double qracSuccess(const PmBehavior& p, int m, int d);
// eta = (q - W) / (T - W).
double relativeValue(double q, const Certificate& cert);

// The even-parity strings 000, 011, 101, 110 of the reduced QRAC, indexed by preparation.
const std::vector<std::array<int, 3>>& reducedQracStrings();

// ---------------------------------------------------------------------------
// Fixtures

struct Measured {
    double value = 0;
    double sigma = 0;
};

// One observed statistic with the direction in which it certifies more.
struct Statistic {
    enum class Direction { AtLeast, AtMost };
    std::string name;
    Functional functional;
    Measured measured;
    Direction direction = Direction::AtLeast;
};

struct Fixture {
    std::string name;
    int version = 0;
    CertKind kind = CertKind::Bell;
    std::string source;
    std::vector<Statistic> statistics;        // correlators, probabilities, game values
    std::map<std::string, Measured> published; // raw published derived values
    std::vector<std::string> assumptions;

    bool empty() const { return statistics.empty(); }
    const Statistic& statistic(const std::string& name) const;
    // Observed value of a built-in certificate; prefers the raw published
    // base value when the fixture carries one.
    double certificateValue(const Certificate& cert) const;
    // Full behavior implied by the statistics under the recorded assumptions.
    BellBehavior impliedBellBehavior() const;
    PmBehavior impliedPmBehavior() const;
};

Fixture loadFixture(const std::string& name);
Fixture parseFixture(const std::string& jsonText);
std::vector<std::string> fixtureNames();

// Rows of the measurement-device-independent protocol comparison table.
struct ProtocolRow {
    std::string label;
    double eventRateHz = 0;
    double rawBitsPerEvent = 0;
    double bitRate = 0;
    double bitRateOverEventRate = 0;
};
std::vector<ProtocolRow> publishedProtocolRows();

}  // namespace povmrand
