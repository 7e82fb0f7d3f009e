#pragma once

#include "snnls/matrix.hpp"

#include <vector>

namespace snnls {

// Partition of row indices {0..n-1} into disjoint groups. Validated on
// construction: non-empty groups, in range, no overlap, full cover.
class BlockStructure {
public:
    BlockStructure() : n_(0) {}
    BlockStructure(int n, std::vector<std::vector<int>> groups);

    // n must divide evenly into blocks of block_size.
    static BlockStructure contiguous(int n, int block_size);

    int n() const { return n_; }
    int num_blocks() const { return static_cast<int>(groups_.size()); }
    const std::vector<int>& group(int b) const { return groups_[b]; }
    const std::vector<std::vector<int>>& groups() const { return groups_; }
    // Block index owning row i.
    int block_of(int i) const { return owner_[i]; }

private:
    int n_;
    std::vector<std::vector<int>> groups_;
    std::vector<int> owner_;
};

// Per-block column statistics of H (n x m): for each block b and column j,
// z=2 gives the squared l2 energy sum_{i in b} H(i,j)^2, z=1 the l1 sum.
// Result is num_blocks x m. Accumulation order: ascending index within the
// group, so singleton blocks reproduce scalar h^2 / h exactly.
Matrix block_stats(const Matrix& h, const BlockStructure& blocks, int z);

}  // namespace snnls
