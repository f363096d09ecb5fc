#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <tuple>

#include "povmrand/sdp.hpp"

namespace povmrand {

int SdpInstance::totalDimension() const {
    int n = 0;
    for (int s : blockSizes) n += std::abs(s);
    return n;
}

void SdpInstance::validate() const {
    if (blockSizes.empty()) throw InputError("SDP instance has no blocks");
    for (int s : blockSizes)
        if (s == 0) throw InputError("SDP block of size zero");
    if (F.size() != c.size() + 1) throw InputError("SDP instance needs m+1 constraint matrices");
    for (const auto& mat : F)
        for (const auto& e : mat) {
            if (e.block < 0 || e.block >= static_cast<int>(blockSizes.size())) throw InputError("entry block out of range");
            const int n = std::abs(blockSizes[static_cast<std::size_t>(e.block)]);
            if (e.i < 0 || e.j < e.i || e.j >= n) throw InputError("entry index outside the upper triangle of its block");
            if (blockSizes[static_cast<std::size_t>(e.block)] < 0 && e.i != e.j)
                throw InputError("off-diagonal entry in a diagonal block");
            if (!std::isfinite(e.value)) throw InputError("non-finite entry");
        }
}

BlockMatrix BlockMatrix::zeros(const std::vector<int>& sizes) {
    BlockMatrix m;
    for (int s : sizes) {
        if (s > 0) {
            m.dense.push_back(Eigen::MatrixXd::Zero(s, s));
            m.diag.emplace_back();
        } else {
            m.dense.emplace_back();
            m.diag.push_back(Eigen::VectorXd::Zero(-s));
        }
    }
    return m;
}

BlockMatrix BlockMatrix::identity(const std::vector<int>& sizes, double scale) {
    BlockMatrix m = zeros(sizes);
    for (std::size_t b = 0; b < sizes.size(); ++b) {
        if (sizes[b] > 0) m.dense[b].diagonal().setConstant(scale);
        else m.diag[b].setConstant(scale);
    }
    return m;
}

double BlockMatrix::trace() const {
    double t = 0;
    for (std::size_t b = 0; b < dense.size(); ++b) t += dense[b].size() ? dense[b].trace() : diag[b].sum();
    return t;
}

double BlockMatrix::dot(const BlockMatrix& o) const {
    double t = 0;
    for (std::size_t b = 0; b < dense.size(); ++b)
        t += dense[b].size() ? dense[b].cwiseProduct(o.dense[b]).sum() : diag[b].dot(o.diag[b]);
    return t;
}

double BlockMatrix::maxAbs() const {
    double m = 0;
    for (std::size_t b = 0; b < dense.size(); ++b)
        m = std::max(m, dense[b].size() ? dense[b].cwiseAbs().maxCoeff() : diag[b].cwiseAbs().maxCoeff());
    return m;
}

double BlockMatrix::minEigenvalue() const {
    double m = INFINITY;
    for (std::size_t b = 0; b < dense.size(); ++b) {
        if (dense[b].size()) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(dense[b], Eigen::EigenvaluesOnly);
            m = std::min(m, es.eigenvalues()(0));
        } else {
            m = std::min(m, diag[b].minCoeff());
        }
    }
    return m;
}

void BlockMatrix::axpy(double a, const BlockMatrix& x) {
    for (std::size_t b = 0; b < dense.size(); ++b) {
        if (dense[b].size()) dense[b] += a * x.dense[b];
        else diag[b] += a * x.diag[b];
    }
}

void BlockMatrix::addEntries(const std::vector<SdpEntry>& entries, double scale) {
    for (const auto& e : entries) {
        const auto b = static_cast<std::size_t>(e.block);
        const double v = scale * e.value;
        if (dense[b].size()) {
            dense[b](e.i, e.j) += v;
            if (e.i != e.j) dense[b](e.j, e.i) += v;
        } else {
            diag[b](e.i) += v;
        }
    }
}

// ---------------------------------------------------------------------------

namespace {

class Eliminator {
public:
    explicit Eliminator(int vars) : expr_(static_cast<std::size_t>(vars)), eliminated_(static_cast<std::size_t>(vars), false) {}

    Affine substitute(const Affine& a) const {
        Affine r;
        r.constant = a.constant;
        bool any = false;
        for (const auto& [v, c] : a.terms)
            if (eliminated_[static_cast<std::size_t>(v)]) any = true;
        if (!any) return a;
        for (const auto& [v, c] : a.terms) {
            if (eliminated_[static_cast<std::size_t>(v)]) r.addScaled(expr_[static_cast<std::size_t>(v)], c);
            else r.add(v, c);
        }
        return r;
    }

    // Imposes a == 0. Returns false if it reduces to a nonzero constant.
    bool impose(const Affine& a) {
        const Affine e = substitute(a);
        if (e.terms.empty()) return std::abs(e.constant) <= 1e-9 * (1 + std::abs(a.constant));
        auto pivot = e.terms.front();
        for (const auto& t : e.terms)
            if (std::abs(t.second) > std::abs(pivot.second)) pivot = t;
        Affine sol;
        sol.constant = -e.constant / pivot.second;
        for (const auto& [v, c] : e.terms)
            if (v != pivot.first) sol.add(v, -c / pivot.second);
        for (std::size_t q = 0; q < expr_.size(); ++q) {
            if (!eliminated_[q]) continue;
            auto& ex = expr_[q];
            auto it = std::find_if(ex.terms.begin(), ex.terms.end(), [&](const auto& t) { return t.first == pivot.first; });
            if (it == ex.terms.end()) continue;
            const double c = it->second;
            ex.terms.erase(it);
            ex.addScaled(sol, c);
        }
        expr_[static_cast<std::size_t>(pivot.first)] = sol;
        eliminated_[static_cast<std::size_t>(pivot.first)] = true;
        return true;
    }

    bool eliminated(int v) const { return eliminated_[static_cast<std::size_t>(v)]; }

private:
    std::vector<Affine> expr_;
    std::vector<bool> eliminated_;
};

}  // namespace

std::vector<double> CompiledProblem::moments(const std::vector<double>& x) const {
    std::vector<double> y(momentExpr.size());
    for (std::size_t v = 0; v < momentExpr.size(); ++v) y[v] = momentExpr[v].evaluate(x);
    return y;
}

CompiledProblem compile(const MomentProblem& problem) {
    const int nv = problem.variableCount();
    Eliminator elim(nv);
    for (const auto& eq : problem.equalities)
        if (!elim.impose(eq)) throw InputError("infeasible: structural equality constraints are inconsistent");
    for (const auto& d : problem.data) {
        if (d.spec.sense != Sense::Equal) continue;
        Affine eq = d.form;
        eq.constant -= d.spec.value;
        if (!elim.impose(eq)) throw InputError("infeasible: data constraint '" + d.spec.name + "' contradicts the others");
    }

    CompiledProblem cp;
    std::vector<int> freeIndex(static_cast<std::size_t>(nv), -1);
    int m = 0;
    for (int v = 0; v < nv; ++v)
        if (!elim.eliminated(v)) freeIndex[static_cast<std::size_t>(v)] = m++;

    auto toSdp = [&](const Affine& a) {
        const Affine s = elim.substitute(a);
        Affine r;
        r.constant = s.constant;
        for (const auto& [v, c] : s.terms) r.add(freeIndex[static_cast<std::size_t>(v)], c);
        return r;
    };

    cp.momentExpr.reserve(static_cast<std::size_t>(nv));
    for (int v = 0; v < nv; ++v) {
        Affine a;
        a.add(v, 1.0);
        cp.momentExpr.push_back(toSdp(a));
    }

    auto& sdp = cp.sdp;
    sdp.c.assign(static_cast<std::size_t>(m), 0.0);
    sdp.F.assign(static_cast<std::size_t>(m) + 1, {});
    auto emit = [&](int block, int i, int j, const Affine& a) {
        if (a.constant != 0) sdp.F[0].push_back({block, i, j, a.constant});
        for (const auto& [k, c] : a.terms) sdp.F[static_cast<std::size_t>(k) + 1].push_back({block, i, j, c});
    };

    for (const auto& blk : problem.blocks) {
        const int b = static_cast<int>(sdp.blockSizes.size());
        cp.psdBlockOf.push_back(b);
        sdp.blockSizes.push_back(blk.size());
        for (int i = 0; i < blk.size(); ++i)
            for (int j = i; j < blk.size(); ++j) emit(b, i, j, toSdp(blk.at(i, j)));
    }

    cp.dataRow.assign(problem.data.size(), -1);
    int rows = 0;
    const int dataBlock = static_cast<int>(sdp.blockSizes.size());
    for (std::size_t k = 0; k < problem.data.size(); ++k) {
        const auto& d = problem.data[k];
        if (d.spec.sense == Sense::Equal) continue;
        Affine slack = toSdp(d.form);
        slack.constant -= d.spec.value;
        if (d.spec.sense == Sense::AtMost) {
            Affine neg;
            neg.addScaled(slack, -1.0);
            slack = neg;
        }
        cp.dataRow[k] = rows;
        emit(dataBlock, rows, rows, slack);
        ++rows;
    }
    if (rows > 0) {
        sdp.blockSizes.push_back(-rows);
        cp.dataBlock = dataBlock;
    }

    const Affine obj = toSdp(problem.objective);
    cp.objectiveConstant = obj.constant;
    for (const auto& [k, c] : obj.terms) sdp.c[static_cast<std::size_t>(k)] = -c;
    for (auto& mat : sdp.F)
        std::sort(mat.begin(), mat.end(), [](const SdpEntry& a, const SdpEntry& b) {
            return std::tie(a.block, a.i, a.j) < std::tie(b.block, b.i, b.j);
        });
    return cp;
}

}  // namespace povmrand
