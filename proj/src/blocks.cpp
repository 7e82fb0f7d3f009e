#include "snnls/blocks.hpp"

namespace snnls {

BlockStructure::BlockStructure(int n, std::vector<std::vector<int>> groups)
    : n_(n), groups_(std::move(groups)), owner_(n, -1) {
    if (n <= 0) throw ValidationError("BlockStructure: n must be positive, got " + std::to_string(n));
    for (size_t b = 0; b < groups_.size(); ++b) {
        if (groups_[b].empty())
            throw ValidationError("BlockStructure: block " + std::to_string(b) + " is empty");
        for (int i : groups_[b]) {
            if (i < 0 || i >= n)
                throw ValidationError("BlockStructure: index " + std::to_string(i) +
                                      " out of range [0," + std::to_string(n) + ")");
            if (owner_[i] != -1)
                throw ValidationError("BlockStructure: index " + std::to_string(i) +
                                      " appears in blocks " + std::to_string(owner_[i]) +
                                      " and " + std::to_string(b));
            owner_[i] = static_cast<int>(b);
        }
    }
    for (int i = 0; i < n; ++i)
        if (owner_[i] == -1)
            throw ValidationError("BlockStructure: index " + std::to_string(i) +
                                  " not covered by any block");
}

BlockStructure BlockStructure::contiguous(int n, int block_size) {
    if (block_size <= 0 || n <= 0 || n % block_size != 0)
        throw ValidationError("BlockStructure: cannot split " + std::to_string(n) +
                              " rows into blocks of " + std::to_string(block_size));
    std::vector<std::vector<int>> groups;
    for (int start = 0; start < n; start += block_size) {
        std::vector<int> g(block_size);
        for (int i = 0; i < block_size; ++i) g[i] = start + i;
        groups.push_back(std::move(g));
    }
    return BlockStructure(n, std::move(groups));
}

Matrix block_stats(const Matrix& h, const BlockStructure& blocks, int z) {
    if (h.rows() != blocks.n())
        throw ValidationError("block_stats: H has " + std::to_string(h.rows()) +
                              " rows, block structure covers " + std::to_string(blocks.n()));
    if (z != 1 && z != 2) throw ValidationError("block_stats: z must be 1 or 2");
    Matrix s(blocks.num_blocks(), h.cols());
    for (int b = 0; b < blocks.num_blocks(); ++b) {
        for (int j = 0; j < h.cols(); ++j) {
            double acc = 0.0;
            for (int i : blocks.group(b)) {
                const double v = h(i, j);
                acc += (z == 2) ? v * v : v;
            }
            s(b, j) = acc;
        }
    }
    return s;
}

}  // namespace snnls
