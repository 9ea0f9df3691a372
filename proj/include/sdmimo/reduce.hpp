#pragma once

#include "sdmimo/model.hpp"
#include "sdmimo/result.hpp"

namespace sdmimo {

struct LllResult {
    Mat basis;       // L = H * Q, columns size-reduced and Lovasz-ordered
    Mat unimodular;  // Q, integer entries, |det| = 1
};

// Column LLL reduction; requires full column rank and 1/4 < delta <= 1.
LllResult lll_reduce(const Mat& h, double delta = 0.75);

// Componentwise rounding of basis^-1 * y.
VecI zf_initial(const Mat& basis, const Vec& y);

// Reduced search model: the channel is LLL-reduced, coordinates live on the
// integer grid of the (uniformly spaced) alphabet, and each reduced
// coordinate ranges over `l_points` integers around the rounded
// channel-inversion point.
struct ReducedSystem {
    Mat l_basis;
    Mat q_unimodular;
    Vec y_adjusted;   // (y - offset * H * e) / scale, the integer-grid observation
    VecI s_prime;
    int l_points = 0;
    std::vector<std::vector<int>> window;  // per dimension, l_points integers
    double grid_scale = 1.0;               // alphabet value = scale * g + offset
    double grid_offset = 0.0;
    int k_points = 0;                      // original alphabet size, grid 0..k-1
    bool guard_tripped = false;            // ill-conditioned inversion: decode unreduced
};

ReducedSystem build_reduced(const SystemInstance& inst, int l_points, double delta = 0.75);

// Expansion of the reduced coordinates over their windows (no point labels).
ExpansionStructure build_reduced_expansion(const ReducedSystem& reduced);

// Applies the unimodular transform and the affine grid map. Decisions outside
// the original alphabet are flagged, never clamped; out-of-region dimensions
// carry point_choice -1.
DecodeResult map_back(const VecI& u_reduced, const ReducedSystem& reduced,
                      const SystemInstance& inst);

// post-hoc verification helpers (used by tests and the acceptance suite)
bool is_unimodular(const Mat& q, double tol = 1e-6);
bool lll_conditions_hold(const Mat& basis, double delta = 0.75, double tol = 1e-9);

}  // namespace sdmimo
