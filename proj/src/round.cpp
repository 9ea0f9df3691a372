#include "sdmimo/round.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

#include "sdmimo/rng.hpp"

namespace sdmimo {

VecI simple_round(const Mat& y_lift, const BlockLayout& layout) {
    if (y_lift.rows() != layout.total() + 1)
        throw std::invalid_argument("simple_round: lifted matrix size mismatch");
    std::vector<int> choice(static_cast<size_t>(layout.blocks()));
    for (int p = 0; p < layout.blocks(); ++p) {
        int best = 0;
        double best_val = y_lift(0, layout.offsets[p] + 1);
        for (int j = 1; j < layout.sizes[p]; ++j) {
            double v = y_lift(0, layout.offsets[p] + j + 1);
            if (v > best_val) {
                best_val = v;
                best = j;
            }
        }
        choice[static_cast<size_t>(p)] = best;
    }
    return selector_from_choices(choice, layout);
}

Mat pm_one_map(int n) {
    Mat m = Mat::Zero(n + 1, n + 1);
    m(0, 0) = 1.0;
    for (int i = 1; i <= n; ++i) {
        m(i, 0) = -1.0;
        m(i, i) = 2.0;
    }
    return m;
}

Mat psd_factor(const Mat& y) {
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (y + y.transpose()));
    if (es.info() != Eigen::Success) throw std::runtime_error("psd_factor: eigensolver failed");
    Vec lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * lam.asDiagonal();
}

namespace {

double track_best(const VecI& candidate, const BqpProblem& bqp, VecI& best, double& best_obj) {
    double obj = bqp.objective(candidate);
    if (obj < best_obj) {
        best_obj = obj;
        best = candidate;
    }
    return obj;
}

// keep exactly one selected candidate per block: the one maximizing `score`
// among the assigned ones, or the block argmax of `fallback` if none assigned
VecI repair_blocks(const std::vector<char>& assigned, const Vec& score, const Vec& fallback,
                   const BlockLayout& layout) {
    std::vector<int> choice(static_cast<size_t>(layout.blocks()));
    for (int p = 0; p < layout.blocks(); ++p) {
        int best = -1;
        double best_val = 0.0;
        for (int j = 0; j < layout.sizes[p]; ++j) {
            int idx = layout.offsets[p] + j;
            if (!assigned[static_cast<size_t>(idx)]) continue;
            if (best < 0 || score[idx] > best_val) {
                best = j;
                best_val = score[idx];
            }
        }
        if (best < 0) {
            best = 0;
            best_val = fallback[layout.offsets[p]];
            for (int j = 1; j < layout.sizes[p]; ++j) {
                double v = fallback[layout.offsets[p] + j];
                if (v > best_val) {
                    best_val = v;
                    best = j;
                }
            }
        }
        choice[static_cast<size_t>(p)] = best;
    }
    return selector_from_choices(choice, layout);
}

}  // namespace

VecI randomize_alg1(const Mat& y_lift, const BqpProblem& bqp, const RoundingConfig& config) {
    const BlockLayout& layout = bqp.layout;
    const int n = layout.total();
    if (config.m_rand < 1) throw std::invalid_argument("randomize_alg1: m_rand must be >= 1");

    VecI best = simple_round(y_lift, layout);
    double best_obj = bqp.objective(best);

    Mat factor;
    try {
        Mat mmap = pm_one_map(n);
        factor = psd_factor(mmap * y_lift * mmap.transpose());
    } catch (const std::runtime_error&) {
        return best;  // factorization failure: keep the simple-rounding answer
    }

    Rng rng(config.seed);
    Vec first_col = y_lift.col(0).tail(n);
    const int dim = static_cast<int>(factor.cols());
    for (int it = 0; it < config.m_rand; ++it) {
        Vec normal = rng.sphere_vec(dim);
        Vec proj = factor * normal;  // one projection per row, row 0 included
        double sign0 = proj[0] >= 0.0 ? 1.0 : -1.0;
        std::vector<char> assigned(static_cast<size_t>(n));
        Vec score(n);
        for (int i = 0; i < n; ++i) {
            score[i] = sign0 * proj[i + 1];
            assigned[static_cast<size_t>(i)] = score[i] > 0.0;
        }
        VecI u = repair_blocks(assigned, score, first_col, layout);
        track_best(u, bqp, best, best_obj);
    }
    return best;
}

VecI randomize_alg2(const Mat& y_lift, const BqpProblem& bqp, const RoundingConfig& config,
                    const Mat* r, const ProjectionBasis* basis) {
    const BlockLayout& layout = bqp.layout;
    const int n = layout.total();
    if (config.m_rand < 1) throw std::invalid_argument("randomize_alg2: m_rand must be >= 1");

    VecI best = simple_round(y_lift, layout);
    double best_obj = bqp.objective(best);

    const bool on_r = config.factor_r && r != nullptr && basis != nullptr;
    Vec norms(n);
    try {
        if (on_r) {
            // rows of the R factor correspond to [1; truncated selector]; the
            // implicit last candidate of each block stays at norm zero and is
            // picked up by the fallback when no truncated entry fires
            Mat factor = psd_factor(*r);
            norms.setZero();
            int red = 1;
            for (int p = 0; p < layout.blocks(); ++p) {
                const int k = layout.sizes[p];
                for (int j = 0; j + 1 < k; ++j)
                    norms[layout.offsets[p] + j] = factor.row(red + j).norm();
                red += k - 1;
            }
        } else {
            Mat factor = psd_factor(y_lift);
            for (int i = 0; i < n; ++i) norms[i] = factor.row(i + 1).norm();
        }
    } catch (const std::runtime_error&) {
        return best;
    }

    Rng rng(config.seed);
    for (int it = 0; it < config.m_rand; ++it) {
        double threshold;
        Vec scaled = norms;
        if (config.radius_mode == RadiusMode::random_radius) {
            threshold = rng.uniform();
        } else {
            threshold = 0.5;
            scaled *= rng.uniform();
        }
        std::vector<char> assigned(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) assigned[static_cast<size_t>(i)] = scaled[i] > threshold;
        VecI u = repair_blocks(assigned, norms, norms, layout);
        if (on_r) {
            // with no truncated entry above the threshold in a block, the
            // dropped last candidate is the implied selection
            for (int p = 0; p < layout.blocks(); ++p) {
                bool any = false;
                for (int j = layout.offsets[p]; j < layout.offsets[p + 1]; ++j)
                    any = any || assigned[static_cast<size_t>(j)];
                if (!any) {
                    for (int j = layout.offsets[p]; j < layout.offsets[p + 1]; ++j) u[j] = 0;
                    u[layout.offsets[p + 1] - 1] = 1;
                }
            }
        }
        track_best(u, bqp, best, best_obj);
    }
    return best;
}

VecI round_solution(const Mat& y_lift, const BqpProblem& bqp, const RoundingConfig& config,
                    const Mat* r, const ProjectionBasis* basis) {
    switch (config.method) {
        case RoundMethod::simple:
            return simple_round(y_lift, bqp.layout);
        case RoundMethod::alg1:
            return randomize_alg1(y_lift, bqp, config);
        case RoundMethod::alg2:
            return randomize_alg2(y_lift, bqp, config, r, basis);
    }
    throw std::logic_error("round_solution: unknown method");
}

}  // namespace sdmimo
