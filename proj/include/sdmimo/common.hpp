#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

namespace sdmimo {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using VecI = Eigen::VectorXi;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

// Layout of the selector vector u: one block per decoded dimension, block p
// holding block_sizes[p] zero-one entries of which exactly one is set.
struct BlockLayout {
    std::vector<int> sizes;
    std::vector<int> offsets;  // offsets[p] = first index of block p, offsets.back() = total

    BlockLayout() = default;
    explicit BlockLayout(std::vector<int> block_sizes) : sizes(std::move(block_sizes)) {
        offsets.resize(sizes.size() + 1);
        offsets[0] = 0;
        for (size_t p = 0; p < sizes.size(); ++p) {
            if (sizes[p] < 1) throw std::invalid_argument("block size must be >= 1");
            offsets[p + 1] = offsets[p] + sizes[p];
        }
    }
    static BlockLayout uniform(int k, int n) {
        return BlockLayout(std::vector<int>(static_cast<size_t>(n), k));
    }
    int blocks() const { return static_cast<int>(sizes.size()); }
    int total() const { return offsets.empty() ? 0 : offsets.back(); }
    // block owning selector index i (0-based within u)
    int block_of(int i) const {
        for (int p = 0; p < blocks(); ++p)
            if (i < offsets[p + 1]) return p;
        throw std::out_of_range("selector index out of range");
    }
    bool operator==(const BlockLayout& o) const { return sizes == o.sizes; }
};

// u must have exactly one 1 per block and zeros elsewhere (A u = e_N).
inline bool valid_selector(const VecI& u, const BlockLayout& layout) {
    if (u.size() != layout.total()) return false;
    for (int p = 0; p < layout.blocks(); ++p) {
        int ones = 0;
        for (int i = layout.offsets[p]; i < layout.offsets[p + 1]; ++i) {
            if (u[i] != 0 && u[i] != 1) return false;
            ones += u[i];
        }
        if (ones != 1) return false;
    }
    return true;
}

inline VecI selector_from_choices(const std::vector<int>& choice, const BlockLayout& layout) {
    VecI u = VecI::Zero(layout.total());
    for (int p = 0; p < layout.blocks(); ++p) {
        if (choice[p] < 0 || choice[p] >= layout.sizes[p])
            throw std::out_of_range("candidate choice out of range");
        u[layout.offsets[p] + choice[p]] = 1;
    }
    return u;
}

inline std::vector<int> choices_from_selector(const VecI& u, const BlockLayout& layout) {
    if (!valid_selector(u, layout)) throw std::invalid_argument("invalid selector");
    std::vector<int> choice(layout.blocks());
    for (int p = 0; p < layout.blocks(); ++p)
        for (int i = layout.offsets[p]; i < layout.offsets[p + 1]; ++i)
            if (u[i] == 1) choice[p] = i - layout.offsets[p];
    return choice;
}

// Rank-one lifted point Y_u = [1;u][1 u^T], indexed from 0.
inline Mat lift_selector(const VecI& u) {
    Vec v(u.size() + 1);
    v[0] = 1.0;
    for (int i = 0; i < u.size(); ++i) v[i + 1] = u[i];
    return v * v.transpose();
}

}  // namespace sdmimo
