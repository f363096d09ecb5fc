#pragma once

#include <vector>

#include "povmrand/sdp.hpp"

namespace povmrand {

// Constraint entries regrouped by block and sorted by variable, so that row i of
// the Schur complement only visits entries that share a block with F_i.
class SchurPlan {
public:
    explicit SchurPlan(const SdpInstance& inst);

    // Upper triangle accumulated row by row, then mirrored.
    Eigen::MatrixXd compute(const BlockMatrix& B, const BlockMatrix& Z, bool parallel) const;

private:
    struct Ent {
        int var;  // 0-based SDP variable
        int i, j;
        double v;  // halved on the diagonal
    };
    void row(int var, const BlockMatrix& B, const BlockMatrix& Z, double* out) const;

    int m_ = 0;
    std::vector<int> blockSizes_;
    std::vector<std::vector<Ent>> entries_;   // per block
    std::vector<std::vector<int>> start_;     // per block, offset of each variable (size m+1)
    std::vector<std::vector<int>> blocksOf_;  // per variable, blocks where it has entries
};

}  // namespace povmrand
