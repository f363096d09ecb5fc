#include <Eigen/Dense>
#include <cmath>

#include "povmrand/sdp.hpp"

namespace povmrand {

// For a dual-feasible Z the affine function
//   g(y) = obj(y) + Tr(Gamma(y) Z_Gamma) + sum_k z_k s_k(y)
// is constant on the subspace cut out by the equality constraints, so
// g = C + sum_j lambda_j e_j(y). Dropping Tr(Gamma Z) >= 0 leaves a bound on obj
// that depends on the behavior only through the constrained statistics.
Certificate dualCertificate(const SdpSolution& solution, const MomentProblem& problem, const CompiledProblem& compiled) {
    if (!solution.optimal()) throw InputError("dual certificate needs an optimal solution");
    const auto nv = static_cast<std::size_t>(problem.variableCount());
    Eigen::VectorXd g = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(nv));
    double g0 = problem.objective.constant;
    for (const auto& [v, c] : problem.objective.terms) g(v) += c;

    for (std::size_t bi = 0; bi < problem.blocks.size(); ++bi) {
        const auto& blk = problem.blocks[bi];
        const auto& Zb = solution.Z.dense[static_cast<std::size_t>(compiled.psdBlockOf[bi])];
        for (int i = 0; i < blk.size(); ++i)
            for (int j = i; j < blk.size(); ++j) {
                const double w = (i == j ? 1.0 : 2.0) * Zb(i, j);
                const Affine& a = blk.at(i, j);
                g0 += w * a.constant;
                for (const auto& [v, c] : a.terms) g(v) += w * c;
            }
    }

    // Inequality multipliers and signs.
    std::vector<double> z(problem.data.size(), 0.0), sigma(problem.data.size(), 0.0);
    for (std::size_t k = 0; k < problem.data.size(); ++k) {
        const auto& d = problem.data[k];
        if (d.spec.sense == Sense::Equal) continue;
        z[k] = solution.Z.diag[static_cast<std::size_t>(compiled.dataBlock)](compiled.dataRow[k]);
        sigma[k] = d.spec.sense == Sense::AtLeast ? 1.0 : -1.0;
        const double s = z[k] * sigma[k];
        g0 += s * (d.form.constant - d.spec.value);
        for (const auto& [v, c] : d.form.terms) g(v) += s * c;
    }

    // Equalities: structural ones first, then data equalities.
    std::vector<const Affine*> eqs;
    std::vector<Affine> dataEqs;
    std::vector<int> dataOfEq;
    for (const auto& e : problem.equalities) {
        eqs.push_back(&e);
        dataOfEq.push_back(-1);
    }
    dataEqs.reserve(problem.data.size());
    for (std::size_t k = 0; k < problem.data.size(); ++k) {
        const auto& d = problem.data[k];
        if (d.spec.sense != Sense::Equal) continue;
        Affine e = d.form;
        e.constant -= d.spec.value;
        dataEqs.push_back(e);
        eqs.push_back(&dataEqs.back());
        dataOfEq.push_back(static_cast<int>(k));
    }
    const auto ne = static_cast<Eigen::Index>(eqs.size());
    Eigen::VectorXd lambda = Eigen::VectorXd::Zero(ne);
    if (ne > 0) {
        Eigen::MatrixXd E = Eigen::MatrixXd::Zero(ne, static_cast<Eigen::Index>(nv));
        for (Eigen::Index r = 0; r < ne; ++r)
            for (const auto& [v, c] : eqs[static_cast<std::size_t>(r)]->terms) E(r, v) = c;
        lambda = E.transpose().colPivHouseholderQr().solve(g);
    }
    double C = g0;
    for (Eigen::Index r = 0; r < ne; ++r) C -= lambda(r) * eqs[static_cast<std::size_t>(r)]->constant;

    Certificate cert;
    cert.id = "dual";
    cert.kind = problem.algebra == Algebra::Projective ? CertKind::Bell : CertKind::PrepareMeasure;
    cert.functional.constant = C;
    auto addStat = [&](const DataSpec& spec, double coef, double value) {
        // coef * (stat - value) folded into constant + coef * stat
        cert.functional.constant -= coef * value;
        cert.functional = cert.functional + spec.functional.scaled(coef);
    };
    for (Eigen::Index r = 0; r < ne; ++r) {
        const int k = dataOfEq[static_cast<std::size_t>(r)];
        if (k < 0) continue;
        const auto& d = problem.data[static_cast<std::size_t>(k)];
        addStat(d.spec, lambda(r), d.spec.value);
    }
    for (std::size_t k = 0; k < problem.data.size(); ++k) {
        const auto& d = problem.data[k];
        if (d.spec.sense == Sense::Equal) continue;
        addStat(d.spec, -z[k] * sigma[k], d.spec.value);
    }
    return cert;
}

}  // namespace povmrand
