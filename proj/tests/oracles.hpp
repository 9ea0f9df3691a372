#pragma once

// Test-only reference implementations, kept independent of the library code
// paths they check.

#include <cmath>
#include <vector>

#include "sdmimo/model.hpp"
#include "sdmimo/rng.hpp"

namespace oracles {

using namespace sdmimo;

// all valid selectors of a layout, mixed-radix order
inline std::vector<VecI> all_selectors(const BlockLayout& layout) {
    std::vector<VecI> out;
    std::vector<int> choice(static_cast<size_t>(layout.blocks()), 0);
    while (true) {
        out.push_back(selector_from_choices(choice, layout));
        int p = layout.blocks() - 1;
        while (p >= 0) {
            if (++choice[static_cast<size_t>(p)] < layout.sizes[p]) break;
            choice[static_cast<size_t>(p)] = 0;
            --p;
        }
        if (p < 0) break;
    }
    return out;
}

inline double distance2(const Mat& h, const Vec& y, const ExpansionStructure& e, const VecI& u) {
    return (y - h * e.symbol_vector(u)).squaredNorm();
}

// straight-line ML search by full enumeration (no incremental tricks)
inline VecI brute_force_ml(const Mat& h, const Vec& y, const ExpansionStructure& e,
                           double* best_out = nullptr) {
    double best = std::numeric_limits<double>::infinity();
    VecI arg;
    for (const auto& u : all_selectors(e.layout)) {
        double d = distance2(h, y, e, u);
        if (d < best) {
            best = d;
            arg = u;
        }
    }
    if (best_out != nullptr) *best_out = best;
    return arg;
}

// Babai rounding: componentwise nearest integer of the exact solve
inline VecI babai_round(const Mat& basis, const Vec& y) {
    Vec sol = basis.fullPivLu().solve(y);
    VecI out(sol.size());
    for (int i = 0; i < sol.size(); ++i) out[i] = static_cast<int>(std::llround(sol[i]));
    return out;
}

// independent Gram-Schmidt based check of the two LLL conditions
inline bool lll_reduced(const Mat& basis, double delta, double tol = 1e-9) {
    const int n = static_cast<int>(basis.cols());
    std::vector<Vec> bstar;
    Mat mu = Mat::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        Vec v = basis.col(i);
        for (int j = 0; j < i; ++j) {
            mu(i, j) = basis.col(i).dot(bstar[static_cast<size_t>(j)]) /
                       bstar[static_cast<size_t>(j)].squaredNorm();
            v -= mu(i, j) * bstar[static_cast<size_t>(j)];
        }
        bstar.push_back(v);
    }
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(mu(i, j)) > 0.5 + tol) return false;
    for (int k = 1; k < n; ++k) {
        double lhs = bstar[static_cast<size_t>(k)].squaredNorm() +
                     mu(k, k - 1) * mu(k, k - 1) * bstar[static_cast<size_t>(k - 1)].squaredNorm();
        if (lhs < (delta - tol) * bstar[static_cast<size_t>(k - 1)].squaredNorm()) return false;
    }
    return true;
}

// brute-force max-log LLRs over the full candidate set (Eq.-level definition:
// LLR_k = (min_{bit=0} d^2 - min_{bit=1} d^2) / (2 sigma^2))
inline Vec brute_force_maxlog_llr(const Mat& h, const Vec& y, const ExpansionStructure& e,
                                  const Constellation& c, double snr) {
    const int n_bits_total = e.layout.blocks() * c.n_bits;
    Vec d0 = Vec::Constant(n_bits_total, std::numeric_limits<double>::infinity());
    Vec d1 = d0;
    for (const auto& u : all_selectors(e.layout)) {
        double d = distance2(h, y, e, u);
        auto bits = selector_to_bits(u, e, c);
        for (int k = 0; k < n_bits_total; ++k) {
            if (bits[static_cast<size_t>(k)] == 0)
                d0[k] = std::min(d0[k], d);
            else
                d1[k] = std::min(d1[k], d);
        }
    }
    return (d0 - d1) / (2.0 / snr);
}

// random positive semidefinite lifted matrix with a feasible-looking first
// row: Y = sum of a few scaled lifted selectors plus PSD noise, normalized.
inline Mat random_lifted_psd(Rng& rng, const BlockLayout& layout, double noise = 0.05) {
    const int n = layout.total();
    Mat y = Mat::Zero(n + 1, n + 1);
    double wsum = 0.0;
    const int terms = 3;
    for (int t = 0; t < terms; ++t) {
        std::vector<int> choice(static_cast<size_t>(layout.blocks()));
        for (int p = 0; p < layout.blocks(); ++p) choice[static_cast<size_t>(p)] = rng.uniform_int(layout.sizes[p]);
        double w = rng.uniform() + 0.1;
        wsum += w;
        y += w * lift_selector(selector_from_choices(choice, layout));
    }
    y /= wsum;
    Mat g(n + 1, n + 1);
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) g(i, j) = rng.normal();
    y += noise * (g * g.transpose()) / (n + 1);
    y /= y(0, 0);
    return y;
}

inline Mat random_matrix(Rng& rng, int r, int c) {
    Mat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.normal();
    return m;
}

inline CMat random_cmatrix(Rng& rng, int r, int c) {
    CMat m(r, c);
    for (int i = 0; i < r; ++i)
        for (int j = 0; j < c; ++j) m(i, j) = rng.normal_complex();
    return m;
}

// standard error of a BER estimate (binomial, estimated at rate p over n)
inline double binomial_se(double p, double n) {
    return std::sqrt(std::max(p * (1.0 - p), 1e-12) / n);
}

}  // namespace oracles
