#pragma once

#include "sdmimo/relax.hpp"

namespace sdmimo {

enum class RoundMethod { simple, alg1, alg2 };
enum class RadiusMode { random_radius, fixed_radius_random_scale };

struct RoundingConfig {
    RoundMethod method = RoundMethod::simple;
    int m_rand = 50;
    uint64_t seed = 0;
    RadiusMode radius_mode = RadiusMode::random_radius;  // alg2 only
    bool factor_r = false;  // alg2 variant operating on R instead of Y
};

// Per-block argmax over the first column of the lifted matrix; ties go to the
// lowest index.
VecI simple_round(const Mat& y_lift, const BlockLayout& layout);

// Hyperplane rounding after the bijective {0,1} -> {-1,1} remap of the lifted
// matrix; best of m_rand draws plus the simple-rounding baseline.
VecI randomize_alg1(const Mat& y_lift, const BqpProblem& bqp, const RoundingConfig& config);

// Random-radius thresholding of the factor-row norms, applied to the {0,1}
// formulation directly. With config.factor_r and a basis, factors R instead.
VecI randomize_alg2(const Mat& y_lift, const BqpProblem& bqp, const RoundingConfig& config,
                    const Mat* r = nullptr, const ProjectionBasis* basis = nullptr);

VecI round_solution(const Mat& y_lift, const BqpProblem& bqp, const RoundingConfig& config,
                    const Mat* r = nullptr, const ProjectionBasis* basis = nullptr);

// {0,1} -> {-1,1} congruence M with M [1; u] = [1; 2u - 1].
Mat pm_one_map(int n);

// PSD-tolerant factorization: rows v_i with V V^T ~= Y (negative eigenvalues
// clipped at zero).
Mat psd_factor(const Mat& y);

}  // namespace sdmimo
