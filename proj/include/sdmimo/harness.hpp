#pragma once

#include <iosfwd>

#include "sdmimo/detect.hpp"
#include "sdmimo/rng.hpp"

namespace sdmimo {

// One simulated method: detector plus its per-method options, keyed by a
// spec string such as "model_iii+alg1", "model_iv+simple",
// "model_iv_budget(8)", "lll+model_iv(L=4)", "sd", "zf", "exhaustive".
struct MethodSpec {
    std::string name;
    DetectMethod method = DetectMethod::exhaustive;
    RoundMethod rounding = RoundMethod::simple;
    int ineq_budget = kAllInequalities;
    int lll_window = 4;
};

MethodSpec parse_method_spec(const std::string& spec);

struct SimPlan {
    int n_complex = 2;
    int m_complex = 2;
    std::string constellation_path;  // informative; `constellation` is authoritative
    Constellation constellation;
    ExpansionMode mode = ExpansionMode::qam;
    std::vector<double> ebn0_db;
    long trials = 1000;
    long min_errors = 0;  // 0 disables the early-stop rule
    std::vector<MethodSpec> methods;
    uint64_t seed = 1;
    int m_rand = 50;
    SolverConfig solver;
    double lll_delta = 0.75;
    bool serial = false;  // reference single-thread path
};

// Aggregates for one (method, grid point) cell. Decision statistics are
// deterministic in (plan, seed); the *_time fields are measured wall clock.
struct CellStats {
    std::string method;
    double ebn0_db = 0.0;
    double snr = 0.0;
    long trials = 0;
    long bits = 0;
    long bit_errors = 0;
    long symbols = 0;
    long symbol_errors = 0;
    double ber = 0.0;
    double ser = 0.0;
    double ave_time = 0.0;
    double max_time = 0.0;
    double ave_max_time = 0.0;  // mean of the largest 100 decode times
    double out_of_region_rate = 0.0;
    double mean_iterations = 0.0;
    long solver_failures = 0;
    double failure_rate = 0.0;
};

struct SimResult {
    std::vector<CellStats> cells;
};

// Declared convention (the reference material never fixes one): linear SNR
// per receive antenna = Eb/N0 * bits_per_complex_symbol * N_tx / M_rx.
double ebn0_db_to_snr(double ebn0_db, const Constellation& c, int n_complex, int m_complex);

// One random channel use: i.i.d. CN(0,1) channel and noise, uniform symbols.
SystemInstance draw_instance(Rng& rng, const SimPlan& plan, double snr, VecI& u_true,
                             const ExpansionStructure& expansion);

SimResult run_plan(const SimPlan& plan);

void emit_csv(const SimResult& result, std::ostream& out);
SimResult parse_csv(std::istream& in);

int resolve_thread_count(bool serial);

}  // namespace sdmimo
