#include "povmrand/schur.hpp"

#include <algorithm>

namespace povmrand {

SchurPlan::SchurPlan(const SdpInstance& inst) : m_(inst.m()), blockSizes_(inst.blockSizes) {
    const std::size_t nb = blockSizes_.size();
    entries_.assign(nb, {});
    blocksOf_.assign(static_cast<std::size_t>(m_), {});
    for (int k = 0; k < m_; ++k)
        for (const auto& e : inst.F[static_cast<std::size_t>(k) + 1]) {
            auto& list = entries_[static_cast<std::size_t>(e.block)];
            list.push_back({k, e.i, e.j, e.i == e.j ? 0.5 * e.value : e.value});
            auto& bo = blocksOf_[static_cast<std::size_t>(k)];
            if (bo.empty() || bo.back() != e.block) bo.push_back(e.block);
        }
    start_.assign(nb, std::vector<int>(static_cast<std::size_t>(m_) + 1, 0));
    for (std::size_t b = 0; b < nb; ++b) {
        // entries were appended in variable order already
        auto& st = start_[b];
        std::vector<int> count(static_cast<std::size_t>(m_), 0);
        for (const auto& e : entries_[b]) ++count[static_cast<std::size_t>(e.var)];
        for (int k = 0; k < m_; ++k) st[static_cast<std::size_t>(k) + 1] = st[static_cast<std::size_t>(k)] + count[static_cast<std::size_t>(k)];
    }
    for (auto& bo : blocksOf_) {
        std::sort(bo.begin(), bo.end());
        bo.erase(std::unique(bo.begin(), bo.end()), bo.end());
    }
}

void SchurPlan::row(int var, const BlockMatrix& B, const BlockMatrix& Z, double* out) const {
    for (int b : blocksOf_[static_cast<std::size_t>(var)]) {
        const auto ub = static_cast<std::size_t>(b);
        const auto& list = entries_[ub];
        const int* st = start_[ub].data();
        const int begin = st[var], mid = st[var + 1], end = st[m_];
        if (blockSizes_[ub] < 0) {
            const Eigen::VectorXd& bd = B.diag[ub];
            const Eigen::VectorXd& zd = Z.diag[ub];
            for (int a = begin; a < mid; ++a) {
                const Ent& ei = list[static_cast<std::size_t>(a)];
                for (int c = begin; c < end; ++c) {
                    const Ent& ej = list[static_cast<std::size_t>(c)];
                    if (ej.i != ei.i) continue;
                    out[ej.var] += 4 * ei.v * ej.v * bd(ei.i) * zd(ei.i);
                }
            }
            continue;
        }
        const Eigen::MatrixXd& Bm = B.dense[ub];
        const Eigen::MatrixXd& Zm = Z.dense[ub];
        for (int a = begin; a < mid; ++a) {
            const Ent& ei = list[static_cast<std::size_t>(a)];
            const int p = ei.i, q = ei.j;
            const double* Bp = Bm.col(p).data();
            const double* Bq = Bm.col(q).data();
            const double* Zp = Zm.col(p).data();
            const double* Zq = Zm.col(q).data();
            for (int c = begin; c < end; ++c) {
                const Ent& ej = list[static_cast<std::size_t>(c)];
                const int r = ej.i, s = ej.j;
                // B and Z are symmetric: B(q,r) = Bq[r], Z(s,p) = Zp[s].
                const double t = Bq[r] * Zp[s] + Bq[s] * Zp[r] + Bp[r] * Zq[s] + Bp[s] * Zq[r];
                out[ej.var] += ei.v * ej.v * t;
            }
        }
    }
}

Eigen::MatrixXd SchurPlan::compute(const BlockMatrix& B, const BlockMatrix& Z, bool parallel) const {
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m_, m_);
    // Column i receives M(j, i) for j >= i; entries of row i before i are never touched
    // because each block's entry list is visited from variable i onward.
    if (parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (int i = 0; i < m_; ++i) row(i, B, Z, M.col(i).data());
    } else {
        for (int i = 0; i < m_; ++i) row(i, B, Z, M.col(i).data());
    }
    for (int i = 0; i < m_; ++i)
        for (int j = i + 1; j < m_; ++j) M(i, j) = M(j, i);
    return M;
}

Eigen::MatrixXd schurComplement(const SdpInstance& inst, const BlockMatrix& B, const BlockMatrix& Z, bool parallel) {
    return SchurPlan(inst).compute(B, Z, parallel);
}

// Reference: per constraint, the dense products W_j = B F_j Z, then M_ij = Tr(F_i W_j).
Eigen::MatrixXd schurComplementSerial(const SdpInstance& inst, const BlockMatrix& B, const BlockMatrix& Z) {
    const int m = inst.m();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < m; ++j) {
        BlockMatrix Fj = BlockMatrix::zeros(inst.blockSizes);
        Fj.addEntries(inst.F[static_cast<std::size_t>(j) + 1], 1.0);
        BlockMatrix W = BlockMatrix::zeros(inst.blockSizes);
        for (std::size_t b = 0; b < inst.blockSizes.size(); ++b) {
            if (inst.blockSizes[b] > 0) W.dense[b] = B.dense[b] * Fj.dense[b] * Z.dense[b];
            else W.diag[b] = B.diag[b].cwiseProduct(Fj.diag[b]).cwiseProduct(Z.diag[b]);
        }
        for (int i = 0; i < m; ++i) {
            BlockMatrix Fi = BlockMatrix::zeros(inst.blockSizes);
            Fi.addEntries(inst.F[static_cast<std::size_t>(i) + 1], 1.0);
            M(i, j) = Fi.dot(W);
        }
    }
    return M;
}

}  // namespace povmrand
