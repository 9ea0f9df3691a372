#pragma once

#include "sdmimo/relax.hpp"

namespace sdmimo {

enum class SolveStatus { optimal, max_iter, numerical_failure };

struct SolverConfig {
    double tol_gap = 1e-7;       // relative duality gap target
    double tol_feas = 1e-8;      // primal/dual residual target
    int max_iter = 100;
    double step_fraction = 0.98; // fraction-to-boundary
    double warm_blend = 1e-3;    // (1-b) * warm + b * I
    bool keep_trace = false;     // record per-iteration stats
};

struct IterStat {
    int iter;
    double primal_obj;
    double dual_obj;
    double gap;
    double feas_residual;
};

struct SdpSolution {
    Mat r;               // primal matrix variable
    Mat y_lift;          // V_hat R V_hat^T
    double lower_bound = 0.0;
    double gap = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::numerical_failure;
    double feas_residual = 0.0;
    std::vector<IterStat> trace;
};

// Infeasible-start primal-dual path following with Mehrotra
// predictor-corrector; tier IV sign constraints enter through nonnegative
// slack variables. Deterministic: no randomness anywhere in the iteration.
SdpSolution solve(const SdpModel& model, const SolverConfig& config = {},
                  const Mat* warm_start = nullptr);

inline Mat extract_lifted(const SdpSolution& sol) { return sol.y_lift; }
inline Mat extract_lifted(const Mat& r, const ProjectionBasis& basis) { return basis.lift(r); }

void write_trace_csv(const SdpSolution& sol, std::ostream& out);

}  // namespace sdmimo
