#pragma once

#include <iosfwd>
#include <optional>

#include "sdmimo/model.hpp"

namespace sdmimo {

// min u^T Q u + 2 c^T u over valid selectors, the lifted form using
// L = [[0, c^T], [c, Q]].
struct BqpProblem {
    Mat q;   // S^T H^T H S
    Vec c;   // -S^T H^T y
    Mat lq;  // (n+1) x (n+1)
    BlockLayout layout;

    int n() const { return static_cast<int>(q.rows()); }
    double objective(const VecI& u) const {
        Vec ud = u.cast<double>();
        return ud.dot(q * ud) + 2.0 * c.dot(ud);
    }
};

BqpProblem build_bqp(const Mat& channel, const Vec& received, const ExpansionStructure& expansion);
inline BqpProblem build_bqp(const SystemInstance& inst, const ExpansionStructure& expansion) {
    return build_bqp(inst.channel, inst.received, expansion);
}

// Basis of the minimal face: Y = V_hat R V_hat^T with R of order
// m = 1 + sum_p (K_p - 1). Row 0 of Y is the homogenization row.
struct ProjectionBasis {
    Mat v_hat;  // (n+1) x m
    Mat w;      // n x m, the lower block of v_hat
    Mat t;      // N x (n+1), [-e | A]; t * v_hat = 0
    BlockLayout layout;
    int m = 0;

    Mat lift(const Mat& r) const { return v_hat * r * v_hat.transpose(); }
    // reduced coordinates [1; x_trunc] of a selector (last entry of each block dropped)
    Vec reduced_point(const VecI& u) const;
};

// V of the column-sum parameterization for a single block of size k.
Mat projection_v(int k);
// F with e_K^T F = e_N^T, the particular solution of the column-sum system.
Mat projection_f(int k, int n);
// X = F + V Z recovers a column-stochastic-sum matrix from its first K-1 rows.
Mat reconstruct_column_stochastic(const Mat& z, int k, int n);

ProjectionBasis build_projection(const BlockLayout& layout);
inline ProjectionBasis build_projection(int k, int n) {
    return build_projection(BlockLayout::uniform(k, n));
}

// Index sets of the gangster operator on the lifted matrix (0-indexed rows
// and columns of Y; entry 0 is the homogenization coordinate).
struct GangsterIndex {
    std::vector<std::pair<int, int>> j;      // within-block off-diagonal pairs, forced to zero
    std::vector<std::pair<int, int>> j_bar;  // j plus (0,0)
    std::vector<std::pair<int, int>> j_hat;  // cross-block pairs kept as sign constraints
};

GangsterIndex gangster_indices(const BlockLayout& layout);
inline GangsterIndex gangster_indices(int k, int n) {
    return gangster_indices(BlockLayout::uniform(k, n));
}

// G_J(Y): zero outside J (symmetric completion of the index set).
Mat gangster_apply(const Mat& y, const std::vector<std::pair<int, int>>& idx);

// Arithmetic mean of all lifted feasible points.
Mat barycenter(const BlockLayout& layout);
inline Mat barycenter(int k, int n) { return barycenter(BlockLayout::uniform(k, n)); }

// Strictly positive definite R with V_hat R V_hat^T = barycenter.
Mat interior_point(const BlockLayout& layout);
inline Mat interior_point(int k, int n) { return interior_point(BlockLayout::uniform(k, n)); }

enum class ModelTier { ii, iii, iv };

// One linear functional on Y entries: sum_t w_t * Y(i_t, j_t) (= rhs or >= 0).
struct LinearTerm {
    int i, j;
    double w;
};
struct LiftedConstraint {
    std::vector<LinearTerm> terms;
    double rhs = 0.0;
};

struct SdpModel {
    Mat objective;  // V_hat^T L V_hat, m x m
    std::vector<LiftedConstraint> equalities;
    std::vector<std::pair<int, int>> inequalities;  // Y(i,j) >= 0
    ModelTier tier = ModelTier::iii;
    ProjectionBasis basis;
    int m = 0;
};

constexpr int kAllInequalities = -1;

// Tier II: diagonal-equals-first-row; tier III: gangster equalities; tier IV
// adds nonnegativity rows. With a budget below |J_hat| the rows are the most
// violated entries of `y_prior` (most negative first, lexicographic ties).
SdpModel assemble_model(const BqpProblem& bqp, ModelTier tier,
                        int ineq_budget = kAllInequalities,
                        const Mat* y_prior = nullptr);

void dump_model(const SdpModel& model, std::ostream& out);
SdpModel load_model(std::istream& in);

}  // namespace sdmimo
