#pragma once

#include "sdmimo/baseline.hpp"
#include "sdmimo/reduce.hpp"
#include "sdmimo/round.hpp"
#include "sdmimo/solver.hpp"

namespace sdmimo {

enum class DetectMethod {
    exhaustive,
    sphere,
    zf,
    model_iii,
    model_iv,
    model_iv_budget,
    lll_model_iv,
};

struct DetectConfig {
    DetectMethod method = DetectMethod::model_iii;
    RoundingConfig rounding;
    SolverConfig solver;
    int ineq_budget = kAllInequalities;  // model_iv_budget
    int lll_window = 4;                  // L
    double lll_delta = 0.75;
};

// Relaxation-based detection on an explicit (channel, received, expansion)
// triple; used by detect(), the reduced path and the soft decoder.
DecodeResult sdp_detect(const Mat& channel, const Vec& received,
                        const ExpansionStructure& expansion, ModelTier tier,
                        const RoundingConfig& rounding, const SolverConfig& solver,
                        int ineq_budget = kAllInequalities);

DecodeResult detect(const SystemInstance& inst, const DetectConfig& config);

const char* method_name(DetectMethod m);

}  // namespace sdmimo
