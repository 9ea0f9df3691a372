#pragma once

#include <functional>

#include "sdmimo/detect.hpp"

namespace sdmimo {

// Hard subproblem solver plugged into the soft decoder: either the SDP
// pipeline or an exact oracle (exhaustive / sphere).
using HardSolver =
    std::function<DecodeResult(const Mat&, const Vec&, const ExpansionStructure&)>;

HardSolver exhaustive_solver();
HardSolver sphere_solver();
HardSolver sdp_solver(ModelTier tier, const RoundingConfig& rounding, const SolverConfig& solver);

struct SoftConfig {
    HardSolver solver = exhaustive_solver();
    double clamp = 50.0;            // |LLR| cap
    bool fallback_exhaustive = true;  // exact fallback for failed subproblems
    Vec prior_llr;                  // kept in the interface; must be zero
    bool parallel = true;
};

struct LlrResult {
    Vec llr;                  // length N * n_bits
    int solved_subproblems = 0;
    std::vector<std::pair<double, double>> per_bit_objectives;  // squared distance (bit=0, bit=1)
    std::vector<int> subproblem_status;  // 0 ok, 1 fallback used, 2 failed
    VecI hard_u;                         // unconstrained hard decision
    std::vector<int> hard_bits;
    Vec prior_llr;                       // zeros under the equiprobable assumption
};

// Restricts the block owning the given bit to the candidates whose label bit
// equals `value`.
ExpansionStructure constrained_expansion(const ExpansionStructure& expansion, int bit_index,
                                         int value, const Constellation& c);

// Max-log LLRs, one unconstrained solve plus one constrained solve per bit.
LlrResult soft_decode(const SystemInstance& inst, const SoftConfig& config = {});

void write_llr_csv(const LlrResult& r, long trial, std::ostream& out, bool header = true);

}  // namespace sdmimo
