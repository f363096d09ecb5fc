#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "povmrand/schur.hpp"
#include "povmrand/sdp.hpp"

namespace povmrand {

const char* statusName(SdpStatus s) {
    switch (s) {
        case SdpStatus::Optimal: return "optimal";
        case SdpStatus::MaxIterations: return "max-iterations";
        case SdpStatus::Infeasible: return "infeasible";
        case SdpStatus::NumericalFailure: return "numerical-failure";
    }
    return "unknown";
}

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double entryTrace(const SdpEntry& e, const BlockMatrix& X) {
    const auto b = static_cast<std::size_t>(e.block);
    if (X.dense[b].size()) return e.i == e.j ? e.value * X.dense[b](e.i, e.j) : 2 * e.value * X.dense[b](e.i, e.j);
    return e.value * X.diag[b](e.i);
}

// out[k] = Tr(F_{k+1} X) for symmetric X.
void traces(const SdpInstance& inst, const BlockMatrix& X, VectorXd& out) {
    out.resize(inst.m());
    for (int k = 0; k < inst.m(); ++k) {
        double t = 0;
        for (const auto& e : inst.F[static_cast<std::size_t>(k) + 1]) t += entryTrace(e, X);
        out(k) = t;
    }
}

double traceF0(const SdpInstance& inst, const BlockMatrix& X) {
    double t = 0;
    for (const auto& e : inst.F[0]) t += entryTrace(e, X);
    return t;
}

BlockMatrix applyF(const SdpInstance& inst, const VectorXd& x) {
    BlockMatrix r = BlockMatrix::zeros(inst.blockSizes);
    r.addEntries(inst.F[0], 1.0);
    for (int k = 0; k < inst.m(); ++k)
        if (x(k) != 0) r.addEntries(inst.F[static_cast<std::size_t>(k) + 1], x(k));
    return r;
}

BlockMatrix linearPart(const SdpInstance& inst, const VectorXd& dx) {
    BlockMatrix r = BlockMatrix::zeros(inst.blockSizes);
    for (int k = 0; k < inst.m(); ++k)
        if (dx(k) != 0) r.addEntries(inst.F[static_cast<std::size_t>(k) + 1], dx(k));
    return r;
}

// sym(A * B * C) block by block
BlockMatrix symProduct(const BlockMatrix& A, const BlockMatrix& B, const BlockMatrix& C) {
    BlockMatrix r = A;
    for (std::size_t b = 0; b < A.dense.size(); ++b) {
        if (A.dense[b].size()) {
            MatrixXd t = A.dense[b] * B.dense[b] * C.dense[b];
            r.dense[b] = 0.5 * (t + t.transpose());
        } else {
            r.diag[b] = A.diag[b].cwiseProduct(B.diag[b]).cwiseProduct(C.diag[b]);
        }
    }
    return r;
}

BlockMatrix sum(const BlockMatrix& a, const BlockMatrix& b) {
    BlockMatrix r = a;
    r.axpy(1.0, b);
    return r;
}

// sym(A * (B1 C1 + B2 C2))
BlockMatrix symProduct2(const BlockMatrix& A, const BlockMatrix& B1, const BlockMatrix& C1, const BlockMatrix& B2,
                        const BlockMatrix& C2) {
    BlockMatrix r = A;
    for (std::size_t b = 0; b < A.dense.size(); ++b) {
        if (A.dense[b].size()) {
            MatrixXd t = A.dense[b] * (B1.dense[b] * C1.dense[b] + B2.dense[b] * C2.dense[b]);
            r.dense[b] = 0.5 * (t + t.transpose());
        } else {
            r.diag[b] = A.diag[b].cwiseProduct(B1.diag[b].cwiseProduct(C1.diag[b]) + B2.diag[b].cwiseProduct(C2.diag[b]));
        }
    }
    return r;
}

bool inverse(const BlockMatrix& X, BlockMatrix& inv) {
    inv = X;
    for (std::size_t b = 0; b < X.dense.size(); ++b) {
        if (X.dense[b].size()) {
            Eigen::LLT<MatrixXd> llt(X.dense[b]);
            if (llt.info() != Eigen::Success) return false;
            inv.dense[b] = llt.solve(MatrixXd::Identity(X.dense[b].rows(), X.dense[b].cols()));
            inv.dense[b] = 0.5 * (inv.dense[b] + inv.dense[b].transpose()).eval();
        } else {
            if (X.diag[b].minCoeff() <= 0) return false;
            inv.diag[b] = X.diag[b].cwiseInverse();
        }
    }
    return true;
}

// Largest alpha with X + alpha dX still positive semi-definite (infinity if unbounded).
double maxStep(const BlockMatrix& X, const BlockMatrix& dX) {
    double alpha = INFINITY;
    for (std::size_t b = 0; b < X.dense.size(); ++b) {
        if (X.dense[b].size()) {
            Eigen::LLT<MatrixXd> llt(X.dense[b]);
            if (llt.info() != Eigen::Success) return 0;
            const auto L = llt.matrixL();
            MatrixXd Y = L.solve(dX.dense[b]);
            Y = L.solve(Y.transpose()).eval();
            Y = 0.5 * (Y + Y.transpose()).eval();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(Y, Eigen::EigenvaluesOnly);
            const double lmin = es.eigenvalues()(0);
            if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
        } else {
            for (Eigen::Index i = 0; i < X.diag[b].size(); ++i)
                if (dX.diag[b](i) < 0) alpha = std::min(alpha, -X.diag[b](i) / dX.diag[b](i));
        }
    }
    return alpha;
}

struct Direction {
    VectorXd dx;
    BlockMatrix dS, dZ;
};

}  // namespace

SdpSolution solveSdp(const SdpInstance& inst, const SdpOptions& opts) {
    inst.validate();
    const int m = inst.m();
    const int n = inst.totalDimension();
    SdpSolution sol;
    const VectorXd c = Eigen::Map<const VectorXd>(inst.c.data(), m);

    double maxEntry = 0;
    for (const auto& mat : inst.F)
        for (const auto& e : mat) maxEntry = std::max(maxEntry, std::abs(e.value));
    for (int k = 0; k < m; ++k) maxEntry = std::max(maxEntry, std::abs(c(k)));
    const double tau = 1 + maxEntry;
    double normF0 = 0;
    for (const auto& e : inst.F[0]) normF0 = std::max(normF0, std::abs(e.value));
    const double normC = m > 0 ? c.cwiseAbs().maxCoeff() : 0.0;

    VectorXd x = VectorXd::Zero(m);
    BlockMatrix S = BlockMatrix::identity(inst.blockSizes, tau);
    BlockMatrix Z = BlockMatrix::identity(inst.blockSizes, tau);

    const SchurPlan plan(inst);
    VectorXd trFZ, trFG, trFSinv;
    sol.status = SdpStatus::MaxIterations;

    // Best iterate by scaled residual; returned when the run ends without converging.
    struct Snapshot {
        double score = INFINITY;
        VectorXd x;
        BlockMatrix S, Z;
        IterationRecord rec;
    } best;

    for (int it = 0;; ++it) {
        const BlockMatrix Fx = applyF(inst, x);
        BlockMatrix Rp = Fx;
        Rp.axpy(-1.0, S);
        traces(inst, Z, trFZ);
        const VectorXd rd = c - trFZ;
        const double pobj = c.dot(x);
        const double dobj = -traceF0(inst, Z);
        const double mu = S.dot(Z) / n;
        const double pinf = Rp.maxAbs() / (1 + normF0);
        const double dinf = (m > 0 ? rd.cwiseAbs().maxCoeff() : 0.0) / (1 + normC);
        const double relgap = std::abs(pobj - dobj) / std::max(1.0, 0.5 * (std::abs(pobj) + std::abs(dobj)));

        IterationRecord rec{it, pobj, dobj, relgap, pinf, dinf, mu, 0, 0};
        if (!sol.log.empty()) {
            rec.stepPrimal = sol.log.back().stepPrimal;
            rec.stepDual = sol.log.back().stepDual;
        }
        sol.log.push_back(rec);
        sol.iterations = it;
        sol.primalObjective = pobj;
        sol.dualObjective = dobj;
        sol.gap = pobj - dobj;
        sol.relativeGap = relgap;
        sol.primalInfeasibility = pinf;
        sol.dualInfeasibility = dinf;

        const double score = std::max({pinf / opts.feasibilityTolerance, dinf / opts.feasibilityTolerance, relgap / opts.gapTolerance});
        if (score < best.score) best = {score, x, S, Z, rec};

        if (pinf <= opts.feasibilityTolerance && dinf <= opts.feasibilityTolerance && relgap <= opts.gapTolerance) {
            sol.status = SdpStatus::Optimal;
            break;
        }
        if (it >= opts.maxIterations) {
            sol.status = SdpStatus::MaxIterations;
            break;
        }
        // Divergence: an exploding dual (primal infeasible) or primal iterate (dual infeasible).
        const double zNorm = Z.maxAbs(), xNorm = m > 0 ? x.cwiseAbs().maxCoeff() : 0.0;
        if (zNorm > 1e10 * tau || xNorm > 1e10 * tau) {
            sol.status = SdpStatus::Infeasible;
            sol.unbounded = xNorm > 1e10 * tau && pobj < -1e8 * tau;
            break;
        }
        if (zNorm > 1e6 * tau && dinf * (1 + normC) < 1e-6 * zNorm && dobj > 1e6 * (1 + std::abs(pobj))) {
            // Normalized dual ray: Tr(F_i Z) ~ 0 and -Tr(F0 Z) > 0 certifies primal infeasibility.
            sol.status = SdpStatus::Infeasible;
            break;
        }

        BlockMatrix Sinv;
        if (!inverse(S, Sinv)) {
            sol.status = SdpStatus::NumericalFailure;
            break;
        }
        MatrixXd M = plan.compute(Sinv, Z, opts.parallelSchur);
        Eigen::LLT<MatrixXd> llt(M);
        if (llt.info() != Eigen::Success) {
            const double reg = 1e-12 * std::max(1.0, M.diagonal().cwiseAbs().maxCoeff());
            M.diagonal().array() += reg;
            llt.compute(M);
            if (llt.info() != Eigen::Success) {
                sol.status = SdpStatus::NumericalFailure;
                break;
            }
        }

        auto direction = [&](double sigmaMu, const Direction* pred) {
            Direction d;
            // h_i = sigma mu Tr(F_i S^-1) - c_i - Tr(F_i S^-1 (Rp Z + dSa dZa))
            BlockMatrix G = pred ? symProduct2(Sinv, Rp, Z, pred->dS, pred->dZ) : symProduct(Sinv, Rp, Z);
            traces(inst, G, trFG);
            VectorXd h = -c - trFG;
            if (sigmaMu != 0) {
                traces(inst, Sinv, trFSinv);
                h += sigmaMu * trFSinv;
            }
            auto build = [&] {
                d.dS = sum(Rp, linearPart(inst, d.dx));
                BlockMatrix corr = pred ? symProduct2(Sinv, d.dS, Z, pred->dS, pred->dZ) : symProduct(Sinv, d.dS, Z);
                d.dZ = Sinv;
                for (std::size_t b = 0; b < d.dZ.dense.size(); ++b) {
                    if (d.dZ.dense[b].size()) d.dZ.dense[b] = sigmaMu * Sinv.dense[b] - Z.dense[b] - corr.dense[b];
                    else d.dZ.diag[b] = sigmaMu * Sinv.diag[b] - Z.diag[b] - corr.diag[b];
                }
            };
            d.dx = llt.solve(h);
            build();
            // Refine against the dual residual of the assembled dZ, which is what the
            // iterate actually inherits.
            VectorXd trDZ;
            for (int r = 0; r < 3; ++r) {
                traces(inst, d.dZ, trDZ);
                const VectorXd e = trDZ - rd;
                if (e.cwiseAbs().maxCoeff() <= 1e-14 * (1 + normC)) break;
                d.dx += llt.solve(e);
                build();
            }
            return d;
        };

        const Direction pred = direction(0.0, nullptr);
        const double ap = std::min(1.0, maxStep(S, pred.dS));
        const double ad = std::min(1.0, maxStep(Z, pred.dZ));
        BlockMatrix Sa = S, Za = Z;
        Sa.axpy(ap, pred.dS);
        Za.axpy(ad, pred.dZ);
        const double muAff = std::max(0.0, Sa.dot(Za) / n);
        const double expo = std::max(1.0, 3 * std::pow(std::min(ap, ad), 2));
        const double sigma = std::clamp(std::pow(muAff / mu, expo), 0.0, 1.0);

        const Direction corr = direction(sigma * mu, &pred);
        const double alphaP = std::min(1.0, opts.stepFraction * maxStep(S, corr.dS));
        const double alphaD = std::min(1.0, opts.stepFraction * maxStep(Z, corr.dZ));
        if (!(alphaP > 1e-14) || !(alphaD > 1e-14) || !corr.dx.allFinite()) {
            sol.status = SdpStatus::NumericalFailure;
            break;
        }
        x += alphaP * corr.dx;
        S.axpy(alphaP, corr.dS);
        Z.axpy(alphaD, corr.dZ);
        sol.log.back().stepPrimal = alphaP;
        sol.log.back().stepDual = alphaD;
    }

    const bool stalled = sol.status == SdpStatus::NumericalFailure || sol.status == SdpStatus::MaxIterations;
    if (stalled && std::isfinite(best.score) && best.rec.iteration != sol.iterations) {
        x = best.x;
        S = best.S;
        Z = best.Z;
        sol.primalObjective = best.rec.primalObjective;
        sol.dualObjective = best.rec.dualObjective;
        sol.gap = sol.primalObjective - sol.dualObjective;
        sol.relativeGap = best.rec.relativeGap;
        sol.primalInfeasibility = best.rec.primalInfeasibility;
        sol.dualInfeasibility = best.rec.dualInfeasibility;
    }
    sol.x.assign(x.data(), x.data() + m);
    sol.S = S;
    sol.Z = Z;
    return sol;
}

BoundResult maximize(const MomentProblem& problem, const CompiledProblem& compiled, const SdpOptions& opts) {
    BoundResult r;
    r.solution = solveSdp(compiled.sdp, opts);
    // An unbounded minimization means the relaxation gives no bound at all.
    r.value = r.solution.unbounded ? INFINITY : compiled.objectiveValue(r.solution.dualObjective);
    r.primalValue = compiled.objectiveValue(r.solution.primalObjective);
    r.gap = r.value - r.primalValue;
    (void)problem;
    return r;
}

BoundResult maximize(const MomentProblem& problem, const SdpOptions& opts) {
    return maximize(problem, compile(problem), opts);
}

}  // namespace povmrand
