#include "povmrand/qsim.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <json.hpp>

namespace povmrand {

CMat hermitianPart(const CMat& m) { return (m + m.adjoint()) * 0.5; }

CMat kron(const CMat& a, const CMat& b) {
    CMat r(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j) r.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return r;
}

CMat pauli(int i) {
    CMat p(2, 2);
    const cplx I(0, 1);
    switch (i) {
        case 0: p << 1, 0, 0, 1; break;
        case 1: p << 0, 1, 1, 0; break;
        case 2: p << 0, -I, I, 0; break;
        case 3: p << 1, 0, 0, -1; break;
        default: throw InputError("Pauli index out of range");
    }
    return p;
}

CMat blochOperator(const Eigen::Vector3d& n, double scale) {
    CMat m = pauli(0);
    for (int i = 0; i < 3; ++i) m += n(i) * pauli(i + 1);
    return m * scale;
}

Eigen::Vector3d blochVector(const CMat& m) {
    if (m.rows() != 2 || m.cols() != 2) throw InputError("Bloch vector needs a 2x2 operator");
    const double t = m.trace().real();
    Eigen::Vector3d n;
    for (int i = 0; i < 3; ++i) n(i) = (m * pauli(i + 1)).trace().real() / t;
    return n;
}

CMat partialTraceB(const CMat& m, int da, int db) {
    CMat r = CMat::Zero(da, da);
    for (int i = 0; i < da; ++i)
        for (int j = 0; j < da; ++j)
            for (int k = 0; k < db; ++k) r(i, j) += m(i * db + k, j * db + k);
    return r;
}

CMat partialTraceA(const CMat& m, int da, int db) {
    CMat r = CMat::Zero(db, db);
    for (int i = 0; i < db; ++i)
        for (int j = 0; j < db; ++j)
            for (int k = 0; k < da; ++k) r(i, j) += m(k * db + i, k * db + j);
    return r;
}

CMat invSqrtPsd(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitianPart(m));
    Eigen::VectorXd ev = es.eigenvalues();
    for (Eigen::Index i = 0; i < ev.size(); ++i) ev(i) = 1.0 / std::sqrt(std::max(ev(i), 1e-300));
    return hermitianPart(es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
}

namespace {

double minEigen(const CMat& m) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitianPart(m), Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

}  // namespace

void QState::validate() const {
    if (rho.rows() != rho.cols() || rho.rows() < 1) throw InputError("density matrix must be square");
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw InputError("density matrix not Hermitian");
    if (std::abs(rho.trace() - cplx(1, 0)) > 1e-12) throw InputError("density matrix trace differs from 1");
    if (minEigen(rho) < -1e-10) throw InputError("density matrix not positive semi-definite");
}

QState QState::pure(const CVec& psi) {
    const CVec v = psi / psi.norm();
    return QState{hermitianPart(v * v.adjoint())};
}

QState QState::maximallyMixed(int d) { return QState{CMat::Identity(d, d) / static_cast<double>(d)}; }

void Measurement::validate() const {
    if (effects.size() < 2) throw InputError("measurement needs at least two effects");
    const auto d = effects.front().rows();
    CMat sum = CMat::Zero(d, d);
    for (const auto& e : effects) {
        if (e.rows() != d || e.cols() != d) throw InputError("effect dimensions differ");
        if ((e - e.adjoint()).cwiseAbs().maxCoeff() > 1e-10) throw InputError("effect not Hermitian");
        if (minEigen(e) < -1e-10) throw InputError("effect not positive semi-definite");
        sum += e;
    }
    if ((sum - CMat::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-12) throw InputError("effects do not sum to identity");
}

Measurement Measurement::observable(const Eigen::Vector3d& n) {
    const Eigen::Vector3d u = n.normalized();
    return Measurement{{blochOperator(u), blochOperator(-u)}};
}

double born(const QState& state, const CMat& effect) {
    if (effect.rows() != state.rho.rows() || effect.cols() != state.rho.cols())
        throw InputError("dimension mismatch between state and effect");
    const double p = (state.rho * effect).trace().real();
    return std::clamp(p, 0.0, 1.0);
}

Measurement tetrahedralPovm() {
    const double a = (3 - std::sqrt(3.0)) / 6, b = std::sqrt(3.0) / 6;
    const cplx I(0, 1);
    CMat m1(2, 2), m2(2, 2), m3(2, 2), m4(2, 2);
    m1 << a, -b * (1.0 + I), b * (-1.0 + I), 1 - a;
    m2 << 1 - a, b * (-1.0 + I), -b * (1.0 + I), a;
    m3 << 1 - a, b * (1.0 - I), b * (1.0 + I), a;
    m4 << a, b * (1.0 + I), b * (1.0 - I), 1 - a;
    return Measurement{{m1 * 0.5, m2 * 0.5, m3 * 0.5, m4 * 0.5}};
}

// ---------------------------------------------------------------------------

void BellStrategy::validate() const {
    state.validate();
    if (state.dim() != da * db) throw InputError("state dimension does not match da*db");
    for (const auto& m : alice) {
        m.validate();
        if (m.dim() != da) throw InputError("Alice's measurement dimension mismatch");
    }
    for (const auto& m : bob) {
        m.validate();
        if (m.dim() != db) throw InputError("Bob's measurement dimension mismatch");
    }
}

BellScenario BellStrategy::scenario() const {
    std::vector<std::vector<int>> out(2);
    for (const auto& m : alice) out[0].push_back(m.outcomes());
    for (const auto& m : bob) out[1].push_back(m.outcomes());
    return BellScenario(out);
}

BellBehavior BellStrategy::behavior() const {
    BellBehavior p(scenario());
    for (std::size_t x = 0; x < alice.size(); ++x)
        for (std::size_t y = 0; y < bob.size(); ++y)
            for (int a = 0; a < alice[x].outcomes(); ++a) {
                // Tr[(M (x) N) rho] = Tr[N Tr_A((M (x) I) rho)]
                const CMat reduced = partialTraceA(kron(alice[x].effects[static_cast<std::size_t>(a)], CMat::Identity(db, db)) * state.rho, da, db);
                for (int b = 0; b < bob[y].outcomes(); ++b)
                    p.at(a, b, static_cast<int>(x), static_cast<int>(y)) =
                        std::clamp((reduced * bob[y].effects[static_cast<std::size_t>(b)]).trace().real(), 0.0, 1.0);
            }
    return p;
}

void PmStrategy::validate() const {
    if (states.empty()) throw InputError("no preparations");
    const int d = states.front().dim();
    for (const auto& s : states) {
        s.validate();
        if (s.dim() != d) throw InputError("preparation dimensions differ");
    }
    for (const auto& m : measurements) {
        m.validate();
        if (m.dim() != d) throw InputError("measurement dimension mismatch");
    }
}

PmScenario PmStrategy::scenario() const {
    PmScenario s{static_cast<int>(states.size()), states.empty() ? 2 : states.front().dim(), {}};
    for (const auto& m : measurements) s.measurements.push_back(m.outcomes());
    return s;
}

PmBehavior PmStrategy::behavior() const {
    PmBehavior p(scenario());
    for (std::size_t x = 0; x < states.size(); ++x)
        for (std::size_t y = 0; y < measurements.size(); ++y)
            for (int b = 0; b < measurements[y].outcomes(); ++b)
                p.at(b, static_cast<int>(x), static_cast<int>(y)) = born(states[x], measurements[y].effects[static_cast<std::size_t>(b)]);
    return p;
}

namespace {

// Bob's elegant directions, up to 1/sqrt(3).
const double kBobDirs[4][3] = {{1, -1, 1}, {1, 1, -1}, {-1, -1, -1}, {-1, 1, 1}};

Eigen::Vector3d bobDir(int y) {
    return Eigen::Vector3d(kBobDirs[y][0], kBobDirs[y][1], kBobDirs[y][2]) / std::sqrt(3.0);
}

}  // namespace

BellStrategy idealElegantStrategy() {
    BellStrategy s;
    CVec phi = CVec::Zero(4);
    phi(0) = phi(3) = 1;
    s.state = QState::pure(phi);
    for (int i = 0; i < 3; ++i) s.alice.push_back(Measurement::observable(Eigen::Vector3d::Unit(i)));
    // For |Phi+>, Tr[(M (x) N) Phi+] = Tr(M^T N) / 2, so Alice's POVM is the transpose of the
    // tetrahedral one; this makes each outcome anti-aligned with Bob's corresponding direction.
    Measurement t = tetrahedralPovm();
    for (auto& e : t.effects) e = e.transpose().eval();
    s.alice.push_back(t);
    for (int y = 0; y < 4; ++y) s.bob.push_back(Measurement::observable(bobDir(y)));
    return s;
}

PmStrategy idealQracStrategy() {
    PmStrategy s;
    for (int x = 0; x < 4; ++x) s.states.push_back(QState{blochOperator(bobDir(x))});
    s.measurements.push_back(Measurement::observable(Eigen::Vector3d::UnitX()));
    s.measurements.push_back(Measurement::observable(-Eigen::Vector3d::UnitY()));
    s.measurements.push_back(Measurement::observable(Eigen::Vector3d::UnitZ()));
    s.measurements.push_back(tetrahedralPovm());
    return s;
}

// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json matToJson(const CMat& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back({m(i, j).real(), m(i, j).imag()});
        rows.push_back(row);
    }
    return rows;
}

CMat matFromJson(const json& j) {
    const auto n = static_cast<Eigen::Index>(j.size());
    CMat m(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != n) throw InputError("matrix rows must be square");
        for (Eigen::Index k = 0; k < n; ++k) {
            const auto& e = row.at(static_cast<std::size_t>(k));
            m(i, k) = cplx(e.at(0).get<double>(), e.at(1).get<double>());
        }
    }
    return m;
}

json measurementsToJson(const std::vector<Measurement>& ms) {
    json arr = json::array();
    for (const auto& m : ms) {
        json effects = json::array();
        for (const auto& e : m.effects) effects.push_back(matToJson(e));
        arr.push_back(effects);
    }
    return arr;
}

std::vector<Measurement> measurementsFromJson(const json& j) {
    std::vector<Measurement> out;
    for (const auto& m : j) {
        Measurement meas;
        for (const auto& e : m) meas.effects.push_back(matFromJson(e));
        out.push_back(std::move(meas));
    }
    return out;
}

json parseOrThrow(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::exception& e) {
        throw InputError(std::string("invalid strategy JSON: ") + e.what());
    }
}

}  // namespace

std::string strategyToJson(const BellStrategy& s) {
    json j;
    j["type"] = "bell";
    j["da"] = s.da;
    j["db"] = s.db;
    j["state"] = matToJson(s.state.rho);
    j["alice"] = measurementsToJson(s.alice);
    j["bob"] = measurementsToJson(s.bob);
    return j.dump(1);
}

std::string strategyToJson(const PmStrategy& s) {
    json j;
    j["type"] = "prepare_measure";
    json states = json::array();
    for (const auto& st : s.states) states.push_back(matToJson(st.rho));
    j["states"] = states;
    j["measurements"] = measurementsToJson(s.measurements);
    return j.dump(1);
}

BellStrategy bellStrategyFromJson(const std::string& text) {
    const json j = parseOrThrow(text);
    try {
        BellStrategy s;
        s.da = j.at("da").get<int>();
        s.db = j.at("db").get<int>();
        s.state.rho = matFromJson(j.at("state"));
        s.alice = measurementsFromJson(j.at("alice"));
        s.bob = measurementsFromJson(j.at("bob"));
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed Bell strategy: ") + e.what());
    }
}

PmStrategy pmStrategyFromJson(const std::string& text) {
    const json j = parseOrThrow(text);
    try {
        PmStrategy s;
        for (const auto& st : j.at("states")) s.states.push_back(QState{matFromJson(st)});
        s.measurements = measurementsFromJson(j.at("measurements"));
        s.validate();
        return s;
    } catch (const json::exception& e) {
        throw InputError(std::string("malformed prepare-and-measure strategy: ") + e.what());
    }
}

}  // namespace povmrand
