#include "sdmimo/detect.hpp"

namespace sdmimo {

namespace {

DecodeResult finish_from_selector(const VecI& u, const Mat& channel, const Vec& received,
                                  const ExpansionStructure& expansion, const char* tag) {
    DecodeResult result;
    result.u = u;
    result.x = expansion.symbol_vector(u);
    result.objective = (received - channel * result.x).squaredNorm();
    result.method = tag;
    auto choices = choices_from_selector(u, expansion.layout);
    result.point_choice = choices;
    return result;
}

}  // namespace

DecodeResult sdp_detect(const Mat& channel, const Vec& received,
                        const ExpansionStructure& expansion, ModelTier tier,
                        const RoundingConfig& rounding, const SolverConfig& solver,
                        int ineq_budget) {
    BqpProblem bqp = build_bqp(channel, received, expansion);
    Mat warm = interior_point(bqp.layout);

    auto run_tier = [&](ModelTier t, int budget, const Mat* prior) {
        SdpModel model = assemble_model(bqp, t, budget, prior);
        return std::make_pair(solve(model, solver, &warm), std::move(model));
    };

    ModelTier effective = tier;
    SdpSolution sol;
    SdpModel model;
    int iterations = 0;
    bool failed = false;
    if (tier == ModelTier::iv && ineq_budget != kAllInequalities && ineq_budget > 0) {
        // budgeted rows ranked by the most violated entries of a tier III solve
        auto [prior_sol, prior_model] = run_tier(ModelTier::iii, kAllInequalities, nullptr);
        iterations += prior_sol.iterations;
        if (prior_sol.status == SolveStatus::numerical_failure) {
            failed = true;
            sol = std::move(prior_sol);
            model = std::move(prior_model);
            effective = ModelTier::iii;
        } else {
            auto [s, mdl] = run_tier(ModelTier::iv, ineq_budget, &prior_sol.y_lift);
            iterations += s.iterations;
            if (s.status == SolveStatus::numerical_failure) {
                // fall back to the tier III solution
                failed = true;
                sol = std::move(prior_sol);
                model = std::move(prior_model);
                effective = ModelTier::iii;
            } else {
                sol = std::move(s);
                model = std::move(mdl);
            }
        }
    } else {
        auto [s, mdl] = run_tier(tier, ineq_budget, nullptr);
        iterations += s.iterations;
        sol = std::move(s);
        model = std::move(mdl);
        if (sol.status == SolveStatus::numerical_failure) {
            failed = true;
            if (tier == ModelTier::iv) {
                auto [s3, mdl3] = run_tier(ModelTier::iii, kAllInequalities, nullptr);
                iterations += s3.iterations;
                if (s3.status != SolveStatus::numerical_failure) {
                    sol = std::move(s3);
                    model = std::move(mdl3);
                    effective = ModelTier::iii;
                }
                // both failed: round the last tier IV iterate below
            }
        }
    }

    VecI u;
    if (sol.status == SolveStatus::numerical_failure) {
        // simple rounding of the last iterate
        u = simple_round(sol.y_lift, bqp.layout);
    } else {
        u = round_solution(sol.y_lift, bqp, rounding, &sol.r, &model.basis);
    }

    const char* tag = effective == ModelTier::iv ? "model_iv" : "model_iii";
    DecodeResult result = finish_from_selector(u, channel, received, expansion, tag);
    result.solver_iterations = iterations;
    result.solver_failed = failed || sol.status == SolveStatus::numerical_failure;
    result.flagged = result.solver_failed;
    return result;
}

DecodeResult detect(const SystemInstance& inst, const DetectConfig& config) {
    ExpansionStructure expansion = instance_expansion(inst);

    switch (config.method) {
        case DetectMethod::exhaustive:
            return exhaustive_ml(inst, expansion);
        case DetectMethod::sphere:
            return sphere_decode(inst, expansion);
        case DetectMethod::zf:
            return zero_forcing(inst, expansion);
        case DetectMethod::model_iii:
            return sdp_detect(inst.channel, inst.received, expansion, ModelTier::iii,
                              config.rounding, config.solver);
        case DetectMethod::model_iv:
            return sdp_detect(inst.channel, inst.received, expansion, ModelTier::iv,
                              config.rounding, config.solver);
        case DetectMethod::model_iv_budget:
            return sdp_detect(inst.channel, inst.received, expansion, ModelTier::iv,
                              config.rounding, config.solver, config.ineq_budget);
        case DetectMethod::lll_model_iv: {
            ReducedSystem red = build_reduced(inst, config.lll_window, config.lll_delta);
            if (red.guard_tripped) {
                DecodeResult r = sdp_detect(inst.channel, inst.received, expansion,
                                            ModelTier::iv, config.rounding, config.solver);
                r.flagged = true;
                r.method = "lll(guard:model_iv)";
                return r;
            }
            ExpansionStructure rexp = build_reduced_expansion(red);
            DecodeResult inner = sdp_detect(red.l_basis, red.y_adjusted, rexp, ModelTier::iv,
                                            config.rounding, config.solver);
            DecodeResult mapped = map_back(inner.u, red, inst);
            mapped.method = "lll+model_iv";
            mapped.solver_iterations = inner.solver_iterations;
            mapped.solver_failed = inner.solver_failed;
            mapped.flagged = inner.flagged;
            return mapped;
        }
    }
    throw std::logic_error("detect: unknown method");
}

const char* method_name(DetectMethod m) {
    switch (m) {
        case DetectMethod::exhaustive: return "exhaustive";
        case DetectMethod::sphere: return "sd";
        case DetectMethod::zf: return "zf";
        case DetectMethod::model_iii: return "model_iii";
        case DetectMethod::model_iv: return "model_iv";
        case DetectMethod::model_iv_budget: return "model_iv_budget";
        case DetectMethod::lll_model_iv: return "lll+model_iv";
    }
    return "?";
}

}  // namespace sdmimo
