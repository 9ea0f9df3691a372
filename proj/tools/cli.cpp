#include "cli.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

#include "sdmimo/io.hpp"
#include "sdmimo/soft.hpp"

namespace {

using namespace sdmimo;

std::ostream* open_out(const std::string& path, std::ofstream& file) {
    if (path.empty() || path == "-") return &std::cout;
    file.open(path);
    if (!file) throw std::invalid_argument("cannot open output file: " + path);
    return &file;
}

void print_decode_result(const DecodeResult& r, std::ostream& out) {
    out << "method: " << r.method << "\n";
    out << "x =";
    for (int i = 0; i < r.x.size(); ++i) out << " " << r.x[i];
    out << "\n";
    out << "objective: " << r.objective << "\n";
    if (r.u.size() > 0) {
        out << "u =";
        for (int i = 0; i < r.u.size(); ++i) out << " " << r.u[i];
        out << "\n";
    }
    if (r.out_of_region) out << "out_of_region: true\n";
    if (r.flagged) out << "flagged: true\n";
    if (r.nodes > 0) out << "nodes: " << r.nodes << "\n";
    if (r.solver_iterations > 0) out << "solver_iterations: " << r.solver_iterations << "\n";
    out << "time_s: " << r.seconds << "\n";
}

int run_decode(const std::string& instance_path, const std::string& method,
               const std::string& rounding, int m_rand, uint64_t seed,
               const std::string& out_path, const std::string& trace_path) {
    SystemInstance inst = load_instance_file(instance_path);
    MethodSpec spec = parse_method_spec(method + (rounding.empty() ? "" : "+" + rounding));
    DetectConfig cfg;
    cfg.method = spec.method;
    cfg.ineq_budget = spec.ineq_budget;
    cfg.lll_window = spec.lll_window;
    cfg.rounding.method = spec.rounding;
    cfg.rounding.m_rand = m_rand;
    cfg.rounding.seed = seed;
    cfg.solver.keep_trace = !trace_path.empty();

    auto t0 = std::chrono::steady_clock::now();
    DecodeResult result;
    if (!trace_path.empty() &&
        (spec.method == DetectMethod::model_iii || spec.method == DetectMethod::model_iv)) {
        // run the solver once more with tracing through the plain pipeline
        ExpansionStructure e = instance_expansion(inst);
        BqpProblem bqp = build_bqp(inst, e);
        SdpModel model = assemble_model(
            bqp, spec.method == DetectMethod::model_iii ? ModelTier::iii : ModelTier::iv);
        Mat warm = interior_point(bqp.layout);
        SdpSolution sol = solve(model, cfg.solver, &warm);
        std::ofstream tf(trace_path);
        if (!tf) throw std::invalid_argument("cannot open trace file: " + trace_path);
        write_trace_csv(sol, tf);
        result = detect(inst, cfg);
    } else {
        result = detect(inst, cfg);
    }
    auto t1 = std::chrono::steady_clock::now();
    result.seconds = std::chrono::duration<double>(t1 - t0).count();

    std::ofstream file;
    print_decode_result(result, *open_out(out_path, file));
    return 0;
}

int run_simulate(const std::string& plan_path, const std::string& out_path, int64_t seed_override,
                 bool serial) {
    SimPlan plan = load_plan_file(plan_path);
    if (seed_override >= 0) plan.seed = static_cast<uint64_t>(seed_override);
    if (serial) plan.serial = true;
    SimResult result = run_plan(plan);
    std::ofstream file;
    emit_csv(result, *open_out(out_path, file));
    return 0;
}

int run_soft(const std::string& instance_path, const std::string& method, int m_rand,
             uint64_t seed, const std::string& out_path) {
    SystemInstance inst = load_instance_file(instance_path);
    SoftConfig cfg;
    if (method == "exhaustive") {
        cfg.solver = exhaustive_solver();
    } else if (method == "sd" || method == "sphere") {
        cfg.solver = sphere_solver();
    } else {
        MethodSpec spec = parse_method_spec(method);
        if (spec.method != DetectMethod::model_iii && spec.method != DetectMethod::model_iv)
            throw std::invalid_argument("soft: method must be exhaustive, sd, model_iii or model_iv");
        RoundingConfig rc;
        rc.method = spec.rounding;
        rc.m_rand = m_rand;
        rc.seed = seed;
        cfg.solver = sdp_solver(
            spec.method == DetectMethod::model_iii ? ModelTier::iii : ModelTier::iv, rc, {});
    }
    LlrResult llr = soft_decode(inst, cfg);
    std::ofstream file;
    write_llr_csv(llr, 0, *open_out(out_path, file));
    return 0;
}

int run_bench(const std::string& plan_path, const std::string& out_path, bool compare_threads) {
    SimPlan plan = load_plan_file(plan_path);
    std::ofstream file;
    std::ostream& out = *open_out(out_path, file);
    auto banner = [&](const SimResult& r, const std::string& label) {
        std::vector<double> grid;
        std::vector<std::string> methods;
        for (const auto& c : r.cells) {
            if (std::find(grid.begin(), grid.end(), c.ebn0_db) == grid.end())
                grid.push_back(c.ebn0_db);
            if (std::find(methods.begin(), methods.end(), c.method) == methods.end())
                methods.push_back(c.method);
        }
        auto cell = [&](const std::string& m, double g) -> const CellStats& {
            for (const auto& c : r.cells)
                if (c.method == m && c.ebn0_db == g) return c;
            throw std::logic_error("bench: missing cell");
        };
        out << "== " << label << " ==\n";
        out << "Eb/N0:";
        for (double g : grid) out << " " << g;
        out << "\n";
        struct Row {
            const char* name;
            double CellStats::* field;
        };
        for (Row row : {Row{"AveTime", &CellStats::ave_time}, Row{"MaxTime", &CellStats::max_time},
                        Row{"AveMaxTime", &CellStats::ave_max_time}}) {
            out << row.name << "\n";
            for (const auto& m : methods) {
                out << "  " << m << ":";
                for (double g : grid) out << " " << cell(m, g).*row.field;
                out << "\n";
            }
        }
    };

    if (compare_threads) {
        SimPlan serial_plan = plan;
        serial_plan.serial = true;
        auto t0 = std::chrono::steady_clock::now();
        SimResult serial_result = run_plan(serial_plan);
        auto t1 = std::chrono::steady_clock::now();
        SimResult parallel_result = run_plan(plan);
        auto t2 = std::chrono::steady_clock::now();
        double ts = std::chrono::duration<double>(t1 - t0).count();
        double tp = std::chrono::duration<double>(t2 - t1).count();
        banner(serial_result, "serial reference");
        banner(parallel_result, "parallel (" + std::to_string(resolve_thread_count(false)) +
                                    " workers)");
        out << "wall_serial_s: " << ts << "\n";
        out << "wall_parallel_s: " << tp << "\n";
        out << "speedup: " << (tp > 0 ? ts / tp : 0.0) << "\n";
        bool identical = serial_result.cells.size() == parallel_result.cells.size();
        for (size_t i = 0; identical && i < serial_result.cells.size(); ++i) {
            const auto& a = serial_result.cells[i];
            const auto& b = parallel_result.cells[i];
            identical = a.method == b.method && a.bit_errors == b.bit_errors &&
                        a.symbol_errors == b.symbol_errors && a.trials == b.trials;
        }
        out << "decisions_identical: " << (identical ? "true" : "false") << "\n";
        return identical ? 0 : 3;
    }
    SimResult result = run_plan(plan);
    banner(result, "bench");
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"semidefinite-relaxation detection for MIMO systems"};
    app.require_subcommand(1);

    std::string instance_path, plan_path, method = "model_iii", rounding, out_path, trace_path;
    int m_rand = 50;
    uint64_t seed = 1;
    int64_t seed_override = -1;
    bool serial = false, compare_threads = false;

    auto* decode = app.add_subcommand("decode", "decode a single instance file");
    decode->add_option("--instance", instance_path, "instance file")->required();
    decode->add_option("--method", method, "detector (exhaustive|sd|zf|model_iii|model_iv|model_iv_budget(n)|lll+model_iv)");
    decode->add_option("--rounding", rounding, "simple|alg1|alg2");
    decode->add_option("--m-rand", m_rand, "randomization iterations");
    decode->add_option("--seed", seed, "rounding seed");
    decode->add_option("--out", out_path, "output file (default stdout)");
    decode->add_option("--solver-trace", trace_path, "write iteration trace CSV");

    auto* simulate = app.add_subcommand("simulate", "run a simulation plan");
    simulate->add_option("--plan", plan_path, "plan file")->required();
    simulate->add_option("--out", out_path, "CSV output (default stdout)");
    simulate->add_option("--seed", seed_override, "override the plan seed");
    simulate->add_flag("--serial", serial, "single-thread reference path");

    auto* soft = app.add_subcommand("soft", "max-log LLRs for an instance file");
    soft->add_option("--instance", instance_path, "instance file")->required();
    soft->add_option("--method", method, "inner hard solver");
    soft->add_option("--m-rand", m_rand, "randomization iterations");
    soft->add_option("--seed", seed, "rounding seed");
    soft->add_option("--out", out_path, "CSV output (default stdout)");

    auto* bench = app.add_subcommand("bench", "timing table for a plan");
    bench->add_option("--plan", plan_path, "plan file")->required();
    bench->add_option("--out", out_path, "output file (default stdout)");
    bench->add_flag("--compare-threads", compare_threads,
                    "also run the serial reference and compare");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (decode->parsed())
            return run_decode(instance_path, method, rounding, m_rand, seed, out_path, trace_path);
        if (simulate->parsed()) return run_simulate(plan_path, out_path, seed_override, serial);
        if (soft->parsed()) return run_soft(instance_path, method, m_rand, seed, out_path);
        if (bench->parsed()) return run_bench(plan_path, out_path, compare_threads);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
