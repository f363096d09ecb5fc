#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <random>

#include "povmrand/qsim.hpp"
#include "povmrand/sdp.hpp"

namespace povmrand {

namespace {

// Real symmetric embedding of a Hermitian matrix: [[Re, -Im], [Im, Re]].
Eigen::MatrixXd realEmbedding(const CMat& h) {
    const auto d = h.rows();
    Eigen::MatrixXd r(2 * d, 2 * d);
    r.topLeftCorner(d, d) = h.real();
    r.bottomRightCorner(d, d) = h.real();
    r.topRightCorner(d, d) = -h.imag();
    r.bottomLeftCorner(d, d) = h.imag();
    return r;
}

void appendDense(std::vector<SdpEntry>& out, int block, const Eigen::MatrixXd& m, double scale) {
    for (int i = 0; i < m.rows(); ++i)
        for (int j = i; j < m.cols(); ++j)
            if (m(i, j) != 0) out.push_back({block, i, j, scale * m(i, j)});
}

// Hermitian basis: diagonal units, then real and imaginary off-diagonal pairs.
std::vector<CMat> hermitianBasis(int d) {
    std::vector<CMat> basis;
    for (int i = 0; i < d; ++i) {
        CMat e = CMat::Zero(d, d);
        e(i, i) = 1;
        basis.push_back(e);
    }
    for (int i = 0; i < d; ++i)
        for (int j = i + 1; j < d; ++j) {
            CMat re = CMat::Zero(d, d), im = CMat::Zero(d, d);
            re(i, j) = re(j, i) = 1;
            im(i, j) = cplx(0, 1);
            im(j, i) = cplx(0, -1);
            basis.push_back(re);
            basis.push_back(im);
        }
    return basis;
}

double povmValue(const Measurement& m, const std::vector<CMat>& c) {
    double v = 0;
    for (std::size_t b = 0; b < c.size(); ++b) v += (m.effects[b] * c[b]).trace().real();
    return v;
}

CMat positiveProjector(const CMat& h) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitianPart(h));
    const auto d = h.rows();
    CMat p = CMat::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k)
        if (es.eigenvalues()(k) > 0) p += es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
    return hermitianPart(p);
}

CVec topEigenvector(const CMat& h) {
    Eigen::SelfAdjointEigenSolver<CMat> es(hermitianPart(h));
    return es.eigenvectors().col(h.rows() - 1);
}

// Clamps effects to PSD and restores completeness with S^{-1/2} M S^{-1/2}.
Measurement repairPovm(std::vector<CMat> effects) {
    const auto d = effects.front().rows();
    CMat total = CMat::Zero(d, d);
    for (auto& e : effects) {
        Eigen::SelfAdjointEigenSolver<CMat> es(hermitianPart(e));
        Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0);
        e = hermitianPart(es.eigenvectors() * ev.cast<cplx>().asDiagonal() * es.eigenvectors().adjoint());
        total += e;
    }
    const CMat k = invSqrtPsd(total);
    for (auto& e : effects) e = hermitianPart(k * e * k);
    return Measurement{std::move(effects)};
}

Measurement bestMeasurement(const std::vector<CMat>& c) {
    if (c.size() == 2) {
        const CMat p = positiveProjector(c[0] - c[1]);
        const auto d = p.rows();
        return Measurement{{p, hermitianPart(CMat::Identity(d, d) - p)}};
    }
    return optimalPovm(c);
}

CMat randomHermitian(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    CMat a(d, d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) a(i, j) = cplx(n(rng), n(rng));
    return hermitianPart(a);
}

Measurement randomMeasurement(int d, int outcomes, std::mt19937_64& rng) {
    if (outcomes == 2) return bestMeasurement({randomHermitian(d, rng), CMat::Zero(d, d)});
    std::vector<CMat> effects;
    for (int b = 0; b < outcomes; ++b) {
        const CMat a = randomHermitian(d, rng);
        effects.push_back(hermitianPart(a * a));
    }
    return repairPovm(std::move(effects));
}

CVec randomVector(int d, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0, 1);
    CVec v(d);
    for (int i = 0; i < d; ++i) v(i) = cplx(n(rng), n(rng));
    return v / v.norm();
}

// Keeps the old measurement unless the new one is strictly better.
void acceptIfBetter(Measurement& current, Measurement candidate, const std::vector<CMat>& c) {
    if (povmValue(candidate, c) > povmValue(current, c)) current = std::move(candidate);
}

}  // namespace

Measurement optimalPovm(const std::vector<CMat>& c) {
    const int outcomes = static_cast<int>(c.size());
    if (outcomes < 2) throw InputError("POVM needs at least two outcomes");
    const int d = static_cast<int>(c.front().rows());
    const auto basis = hermitianBasis(d);
    const int per = d * d;
    const int m = (outcomes - 1) * per;

    SdpInstance inst;
    inst.blockSizes.assign(static_cast<std::size_t>(outcomes), 2 * d);
    inst.c.assign(static_cast<std::size_t>(m), 0.0);
    inst.F.assign(static_cast<std::size_t>(m) + 1, {});
    // Last effect = I - sum of the others.
    appendDense(inst.F[0], outcomes - 1, Eigen::MatrixXd::Identity(2 * d, 2 * d), 1.0);
    const double scale = std::max(1.0, [&] {
        double s = 0;
        for (const auto& ci : c) s = std::max(s, ci.cwiseAbs().maxCoeff());
        return s;
    }());
    for (int b = 0; b + 1 < outcomes; ++b)
        for (int k = 0; k < per; ++k) {
            const int var = b * per + k;
            const auto& e = basis[static_cast<std::size_t>(k)];
            const Eigen::MatrixXd emb = realEmbedding(e);
            appendDense(inst.F[static_cast<std::size_t>(var) + 1], b, emb, 1.0);
            appendDense(inst.F[static_cast<std::size_t>(var) + 1], outcomes - 1, emb, -1.0);
            const double gain =
                (e * (c[static_cast<std::size_t>(b)] - c[static_cast<std::size_t>(outcomes - 1)])).trace().real();
            inst.c[static_cast<std::size_t>(var)] = -gain / scale;
        }
    for (auto& mat : inst.F)
        std::sort(mat.begin(), mat.end(), [](const SdpEntry& a, const SdpEntry& b) {
            return std::tie(a.block, a.i, a.j) < std::tie(b.block, b.i, b.j);
        });
    SdpOptions opts;
    opts.parallelSchur = false;
    const SdpSolution sol = solveSdp(inst, opts);
    std::vector<CMat> effects;
    CMat last = CMat::Identity(d, d);
    for (int b = 0; b + 1 < outcomes; ++b) {
        CMat e = CMat::Zero(d, d);
        for (int k = 0; k < per; ++k) e += sol.x[static_cast<std::size_t>(b * per + k)] * basis[static_cast<std::size_t>(k)];
        last -= e;
        effects.push_back(e);
    }
    effects.push_back(last);
    return repairPovm(std::move(effects));
}

// ---------------------------------------------------------------------------

namespace {

struct BellWeights {
    // w[x][y][a][b]
    std::vector<std::vector<std::vector<std::vector<double>>>> w;
    double constant = 0;
};

BellWeights bellWeights(const BellScenario& s, const Functional& f) {
    BellWeights bw;
    bw.constant = f.constant;
    bw.w.resize(static_cast<std::size_t>(s.settings(0)));
    for (int x = 0; x < s.settings(0); ++x) {
        bw.w[static_cast<std::size_t>(x)].resize(static_cast<std::size_t>(s.settings(1)));
        for (int y = 0; y < s.settings(1); ++y)
            bw.w[static_cast<std::size_t>(x)][static_cast<std::size_t>(y)].assign(
                static_cast<std::size_t>(s.outcomes(0, x)), std::vector<double>(static_cast<std::size_t>(s.outcomes(1, y)), 0.0));
    }
    for (const auto& t : f.terms) {
        const auto& e = t.event;
        if (e.x < 0 || e.x >= s.settings(0) || e.y < 0 || e.y >= s.settings(1) || e.a < 0 || e.a >= s.outcomes(0, e.x) ||
            e.b < 0 || e.b >= s.outcomes(1, e.y))
            throw InputError("objective term outside the scenario");
        bw.w[static_cast<std::size_t>(e.x)][static_cast<std::size_t>(e.y)][static_cast<std::size_t>(e.a)][static_cast<std::size_t>(e.b)] += t.weight;
    }
    return bw;
}

double bellValue(const BellStrategy& s, const Functional& f) { return f.evaluate(s.behavior()); }

SeesawResult<BellStrategy> seesawBellOnce(const BellScenario& scenario, const Functional& objective, int dim,
                                          const SeesawOptions& opts, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const BellWeights bw = bellWeights(scenario, objective);
    BellStrategy st;
    st.da = st.db = dim;
    for (int x = 0; x < scenario.settings(0); ++x) st.alice.push_back(randomMeasurement(dim, scenario.outcomes(0, x), rng));
    for (int y = 0; y < scenario.settings(1); ++y) st.bob.push_back(randomMeasurement(dim, scenario.outcomes(1, y), rng));
    st.state = QState::pure(randomVector(dim * dim, rng));

    SeesawResult<BellStrategy> res;
    const CMat Ib = CMat::Identity(dim, dim), Ia = CMat::Identity(dim, dim);
    double value = bellValue(st, objective);
    res.history.push_back(value);
    for (int it = 0; it < opts.maxIterations; ++it) {
        const double start = value;
        // State: top eigenvector of the Bell operator.
        CMat op = CMat::Zero(dim * dim, dim * dim);
        for (std::size_t x = 0; x < st.alice.size(); ++x)
            for (std::size_t y = 0; y < st.bob.size(); ++y)
                for (std::size_t a = 0; a < st.alice[x].effects.size(); ++a)
                    for (std::size_t b = 0; b < st.bob[y].effects.size(); ++b) {
                        const double w = bw.w[x][y][a][b];
                        if (w != 0) op += w * kron(st.alice[x].effects[a], st.bob[y].effects[b]);
                    }
        const QState cand = QState::pure(topEigenvector(op));
        if ((cand.rho * op).trace().real() > (st.state.rho * op).trace().real()) st.state = cand;
        value = std::max(value, bellValue(st, objective));
        res.history.push_back(bellValue(st, objective));

        for (std::size_t x = 0; x < st.alice.size(); ++x) {
            std::vector<CMat> c(st.alice[x].effects.size(), CMat::Zero(dim, dim));
            for (std::size_t y = 0; y < st.bob.size(); ++y)
                for (std::size_t b = 0; b < st.bob[y].effects.size(); ++b) {
                    const CMat red = partialTraceB(kron(Ia, st.bob[y].effects[b]) * st.state.rho, dim, dim);
                    for (std::size_t a = 0; a < c.size(); ++a)
                        if (bw.w[x][y][a][b] != 0) c[a] += bw.w[x][y][a][b] * red;
                }
            for (auto& ci : c) ci = hermitianPart(ci);
            acceptIfBetter(st.alice[x], bestMeasurement(c), c);
            res.history.push_back(bellValue(st, objective));
        }
        for (std::size_t y = 0; y < st.bob.size(); ++y) {
            std::vector<CMat> c(st.bob[y].effects.size(), CMat::Zero(dim, dim));
            for (std::size_t x = 0; x < st.alice.size(); ++x)
                for (std::size_t a = 0; a < st.alice[x].effects.size(); ++a) {
                    const CMat red = partialTraceA(kron(st.alice[x].effects[a], Ib) * st.state.rho, dim, dim);
                    for (std::size_t b = 0; b < c.size(); ++b)
                        if (bw.w[x][y][a][b] != 0) c[b] += bw.w[x][y][a][b] * red;
                }
            for (auto& ci : c) ci = hermitianPart(ci);
            acceptIfBetter(st.bob[y], bestMeasurement(c), c);
            res.history.push_back(bellValue(st, objective));
        }
        value = bellValue(st, objective);
        if (value - start < opts.tolerance) {
            res.converged = true;
            break;
        }
    }
    res.strategy = std::move(st);
    res.value = value;
    return res;
}

double pmValue(const PmStrategy& s, const Functional& f) { return f.evaluate(s.behavior()); }

SeesawResult<PmStrategy> seesawPmOnce(const PmScenario& scenario, const Functional& objective, const SeesawOptions& opts,
                                      std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    const int d = scenario.dimension;
    const int ny = static_cast<int>(scenario.measurements.size());
    // w[x][y][b]
    std::vector<std::vector<std::vector<double>>> w(static_cast<std::size_t>(scenario.preparations));
    for (auto& wx : w) {
        wx.resize(static_cast<std::size_t>(ny));
        for (int y = 0; y < ny; ++y) wx[static_cast<std::size_t>(y)].assign(static_cast<std::size_t>(scenario.measurements[static_cast<std::size_t>(y)]), 0.0);
    }
    for (const auto& t : objective.terms) {
        const auto& e = t.event;
        if (e.x < 0 || e.x >= scenario.preparations || e.y < 0 || e.y >= ny || e.b < 0 ||
            e.b >= scenario.measurements[static_cast<std::size_t>(e.y)])
            throw InputError("objective term outside the scenario");
        w[static_cast<std::size_t>(e.x)][static_cast<std::size_t>(e.y)][static_cast<std::size_t>(e.b)] += t.weight;
    }

    PmStrategy st;
    for (int x = 0; x < scenario.preparations; ++x) st.states.push_back(QState::pure(randomVector(d, rng)));
    for (int y = 0; y < ny; ++y) st.measurements.push_back(randomMeasurement(d, scenario.measurements[static_cast<std::size_t>(y)], rng));

    SeesawResult<PmStrategy> res;
    double value = pmValue(st, objective);
    res.history.push_back(value);
    for (int it = 0; it < opts.maxIterations; ++it) {
        const double start = value;
        for (std::size_t x = 0; x < st.states.size(); ++x) {
            CMat op = CMat::Zero(d, d);
            for (std::size_t y = 0; y < st.measurements.size(); ++y)
                for (std::size_t b = 0; b < st.measurements[y].effects.size(); ++b)
                    if (w[x][y][b] != 0) op += w[x][y][b] * st.measurements[y].effects[b];
            const QState cand = QState::pure(topEigenvector(op));
            if ((cand.rho * op).trace().real() > (st.states[x].rho * op).trace().real()) st.states[x] = cand;
        }
        res.history.push_back(pmValue(st, objective));
        for (std::size_t y = 0; y < st.measurements.size(); ++y) {
            std::vector<CMat> c(st.measurements[y].effects.size(), CMat::Zero(d, d));
            for (std::size_t x = 0; x < st.states.size(); ++x)
                for (std::size_t b = 0; b < c.size(); ++b)
                    if (w[x][y][b] != 0) c[b] += w[x][y][b] * st.states[x].rho;
            acceptIfBetter(st.measurements[y], bestMeasurement(c), c);
            res.history.push_back(pmValue(st, objective));
        }
        value = pmValue(st, objective);
        if (value - start < opts.tolerance) {
            res.converged = true;
            break;
        }
    }
    res.strategy = std::move(st);
    res.value = value;
    return res;
}

template <class S, class F>
SeesawResult<S> bestOfRestarts(int restarts, F&& once) {
    if (restarts < 1) throw InputError("see-saw needs at least one restart");
    std::vector<SeesawResult<S>> results(static_cast<std::size_t>(restarts));
#pragma omp parallel for schedule(dynamic, 1)
    for (int r = 0; r < restarts; ++r) results[static_cast<std::size_t>(r)] = once(r);
    std::size_t best = 0;
    for (std::size_t r = 1; r < results.size(); ++r)
        if (results[r].value > results[best].value) best = r;
    return std::move(results[best]);
}

}  // namespace

SeesawResult<BellStrategy> seesawBell(const BellScenario& scenario, const Functional& objective, int dim,
                                      const SeesawOptions& opts) {
    if (dim < 2) throw InputError("see-saw dimension must be at least 2");
    const BellScenario ab = scenario.withoutEve();
    return bestOfRestarts<BellStrategy>(opts.restarts, [&](int r) {
        return seesawBellOnce(ab, objective, dim, opts, opts.seed + static_cast<std::uint64_t>(r) * 7919);
    });
}

SeesawResult<PmStrategy> seesawPm(const PmScenario& scenario, const Functional& objective, const SeesawOptions& opts) {
    scenario.validate();
    return bestOfRestarts<PmStrategy>(opts.restarts, [&](int r) {
        return seesawPmOnce(scenario, objective, opts, opts.seed + static_cast<std::uint64_t>(r) * 7919);
    });
}

}  // namespace povmrand
