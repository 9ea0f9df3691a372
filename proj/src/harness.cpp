#include "sdmimo/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdmimo {

MethodSpec parse_method_spec(const std::string& spec) {
    MethodSpec m;
    m.name = spec;
    std::string base = spec;
    // rounding suffix
    auto plus = base.rfind('+');
    std::string tail;
    if (plus != std::string::npos && base.substr(0, plus) != "lll") {
        tail = base.substr(plus + 1);
        base = base.substr(0, plus);
    }
    if (tail == "alg1") m.rounding = RoundMethod::alg1;
    else if (tail == "alg2") m.rounding = RoundMethod::alg2;
    else if (tail == "simple" || tail.empty()) m.rounding = RoundMethod::simple;
    else throw std::invalid_argument("unknown rounding in method spec: " + spec);

    auto paren = base.find('(');
    std::string arg;
    if (paren != std::string::npos) {
        if (base.back() != ')') throw std::invalid_argument("bad method spec: " + spec);
        arg = base.substr(paren + 1, base.size() - paren - 2);
        base = base.substr(0, paren);
    }
    if (base == "exhaustive" || base == "ml") m.method = DetectMethod::exhaustive;
    else if (base == "sd" || base == "sphere") m.method = DetectMethod::sphere;
    else if (base == "zf") m.method = DetectMethod::zf;
    else if (base == "model_iii") m.method = DetectMethod::model_iii;
    else if (base == "model_iv") m.method = DetectMethod::model_iv;
    else if (base == "model_iv_budget") {
        m.method = DetectMethod::model_iv_budget;
        if (arg.empty()) throw std::invalid_argument("model_iv_budget needs a count: " + spec);
        m.ineq_budget = std::stoi(arg);
    } else if (base == "lll+model_iv" || base == "lll") {
        m.method = DetectMethod::lll_model_iv;
        if (!arg.empty()) {
            if (arg.rfind("L=", 0) == 0) arg = arg.substr(2);
            m.lll_window = std::stoi(arg);
        }
    } else {
        throw std::invalid_argument("unknown method spec: " + spec);
    }
    return m;
}

double ebn0_db_to_snr(double ebn0_db, const Constellation& c, int n_complex, int m_complex) {
    double ebn0 = std::pow(10.0, ebn0_db / 10.0);
    return ebn0 * c.bits_per_complex_symbol() * n_complex / static_cast<double>(m_complex);
}

SystemInstance draw_instance(Rng& rng, const SimPlan& plan, double snr, VecI& u_true,
                             const ExpansionStructure& expansion) {
    const int nt = plan.n_complex;
    const int mr = plan.m_complex;
    CMat h(mr, nt);
    for (int i = 0; i < mr; ++i)
        for (int j = 0; j < nt; ++j) h(i, j) = rng.normal_complex();

    std::vector<int> choice(static_cast<size_t>(expansion.layout.blocks()));
    for (int p = 0; p < expansion.layout.blocks(); ++p)
        choice[static_cast<size_t>(p)] = rng.uniform_int(expansion.layout.sizes[p]);
    u_true = selector_from_choices(choice, expansion.layout);

    SystemInstance inst;
    inst.constellation = plan.constellation;
    inst.qam_mode = (plan.mode == ExpansionMode::qam);
    inst.n_complex = nt;
    inst.m_complex = mr;
    inst.snr = snr;
    inst.e_s_av = plan.constellation.avg_symbol_energy();
    double scale = std::sqrt(snr / (mr * inst.e_s_av));
    CVec noise(mr);
    for (int i = 0; i < mr; ++i) noise[i] = rng.normal_complex();
    auto [hr, nr] = complex_to_real(scale * h, noise);
    inst.channel = std::move(hr);
    inst.received = inst.channel * expansion.symbol_vector(u_true) + nr;
    return inst;
}

int resolve_thread_count(bool serial) {
    if (serial) return 1;
    if (const char* env = std::getenv("SDMIMO_WORKERS")) {
        int n = std::atoi(env);
        if (n >= 1) return n;
    }
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

namespace {

struct TrialOutcome {
    long bit_errors = 0;
    long symbol_errors = 0;
    bool out_of_region = false;
    bool solver_failed = false;
    int solver_iterations = 0;
    double seconds = 0.0;
    bool done = false;
};

// per-complex-symbol decision: in qam mode a symbol is a pair of real axes
long count_symbol_errors(const std::vector<int>& truth, const std::vector<int>& decoded,
                         const SimPlan& plan) {
    const int blocks = static_cast<int>(truth.size());
    if (plan.mode == ExpansionMode::psk) {
        long errs = 0;
        for (int p = 0; p < blocks; ++p) errs += truth[p] != decoded[p];
        return errs;
    }
    const int nt = plan.n_complex;
    long errs = 0;
    for (int p = 0; p < nt; ++p)
        errs += (truth[p] != decoded[p]) || (truth[p + nt] != decoded[p + nt]);
    return errs;
}

}  // namespace

SimResult run_plan(const SimPlan& plan) {
    if (plan.ebn0_db.empty()) throw std::invalid_argument("run_plan: empty snr grid");
    if (plan.trials < 1) throw std::invalid_argument("run_plan: trials must be >= 1");
    if (plan.methods.empty()) throw std::invalid_argument("run_plan: no methods requested");
    plan.constellation.validate();

    ExpansionStructure expansion =
        build_expansion(plan.constellation, plan.n_complex, plan.mode);
    const int n_methods = static_cast<int>(plan.methods.size());
    const long bits_per_trial =
        static_cast<long>(expansion.layout.blocks()) * plan.constellation.n_bits;
    const long symbols_per_trial = plan.n_complex;
    const int threads = resolve_thread_count(plan.serial);

    SimResult result;
    for (size_t point = 0; point < plan.ebn0_db.size(); ++point) {
        const double snr =
            ebn0_db_to_snr(plan.ebn0_db[point], plan.constellation, plan.n_complex,
                           plan.m_complex);
        std::vector<std::vector<TrialOutcome>> outcomes(
            static_cast<size_t>(n_methods),
            std::vector<TrialOutcome>(static_cast<size_t>(plan.trials)));

        const long chunk = std::max<long>(64, plan.trials / 16);
        long completed = 0;
        while (completed < plan.trials) {
            const long upto = std::min(plan.trials, completed + chunk);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
            for (long trial = completed; trial < upto; ++trial) {
                Rng rng = Rng::stream(plan.seed, point, static_cast<uint64_t>(trial));
                VecI u_true;
                SystemInstance inst = draw_instance(rng, plan, snr, u_true, expansion);
                auto truth_choice = choices_from_selector(u_true, expansion.layout);
                auto truth_bits = selector_to_bits(u_true, expansion, plan.constellation);

                for (int mi = 0; mi < n_methods; ++mi) {
                    const MethodSpec& ms = plan.methods[static_cast<size_t>(mi)];
                    DetectConfig cfg;
                    cfg.method = ms.method;
                    cfg.solver = plan.solver;
                    cfg.ineq_budget = ms.ineq_budget;
                    cfg.lll_window = ms.lll_window;
                    cfg.lll_delta = plan.lll_delta;
                    cfg.rounding.method = ms.rounding;
                    cfg.rounding.m_rand = plan.m_rand;
                    cfg.rounding.seed = Rng::mix(Rng::mix(plan.seed, point),
                                                 Rng::mix(static_cast<uint64_t>(trial),
                                                          857u + static_cast<uint64_t>(mi)));

                    TrialOutcome& out =
                        outcomes[static_cast<size_t>(mi)][static_cast<size_t>(trial)];
                    auto t0 = std::chrono::steady_clock::now();
                    DecodeResult dec = detect(inst, cfg);
                    auto t1 = std::chrono::steady_clock::now();
                    out.seconds = std::chrono::duration<double>(t1 - t0).count();
                    out.solver_failed = dec.solver_failed;
                    out.solver_iterations = dec.solver_iterations;
                    out.out_of_region = dec.out_of_region;
                    out.done = true;

                    auto pc = dec.point_choice;
                    if (static_cast<int>(pc.size()) != expansion.layout.blocks())
                        pc.assign(static_cast<size_t>(expansion.layout.blocks()), -1);
                    long bit_errs = 0;
                    for (int p = 0; p < expansion.layout.blocks(); ++p) {
                        if (pc[static_cast<size_t>(p)] < 0) {
                            bit_errs += plan.constellation.n_bits;  // out of region: whole label
                            continue;
                        }
                        const auto& lbl = plan.constellation
                                              .labels[static_cast<size_t>(pc[static_cast<size_t>(p)])];
                        for (int b = 0; b < plan.constellation.n_bits; ++b)
                            bit_errs +=
                                lbl[static_cast<size_t>(b)] !=
                                truth_bits[static_cast<size_t>(p * plan.constellation.n_bits + b)];
                    }
                    out.bit_errors = bit_errs;
                    out.symbol_errors = count_symbol_errors(truth_choice, pc, plan);
                }
            }
            completed = upto;
            if (plan.min_errors > 0) {
                bool all_reached = true;
                for (int mi = 0; mi < n_methods; ++mi) {
                    long errs = 0;
                    for (long t = 0; t < completed; ++t)
                        errs += outcomes[static_cast<size_t>(mi)][static_cast<size_t>(t)].bit_errors;
                    all_reached = all_reached && errs >= plan.min_errors;
                }
                if (all_reached) break;
            }
        }

        for (int mi = 0; mi < n_methods; ++mi) {
            CellStats cell;
            cell.method = plan.methods[static_cast<size_t>(mi)].name;
            cell.ebn0_db = plan.ebn0_db[point];
            cell.snr = snr;
            std::vector<double> times;
            double iter_sum = 0.0;
            for (long t = 0; t < completed; ++t) {
                const TrialOutcome& o = outcomes[static_cast<size_t>(mi)][static_cast<size_t>(t)];
                if (!o.done) continue;
                ++cell.trials;
                cell.bit_errors += o.bit_errors;
                cell.symbol_errors += o.symbol_errors;
                cell.out_of_region_rate += o.out_of_region ? 1.0 : 0.0;
                cell.solver_failures += o.solver_failed ? 1 : 0;
                iter_sum += o.solver_iterations;
                times.push_back(o.seconds);
            }
            cell.bits = cell.trials * bits_per_trial;
            cell.symbols = cell.trials * symbols_per_trial;
            cell.ber = cell.bits > 0 ? static_cast<double>(cell.bit_errors) / cell.bits : 0.0;
            cell.ser =
                cell.symbols > 0 ? static_cast<double>(cell.symbol_errors) / cell.symbols : 0.0;
            if (!times.empty()) {
                cell.ave_time = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
                cell.max_time = *std::max_element(times.begin(), times.end());
                std::sort(times.begin(), times.end(), std::greater<double>());
                size_t top = std::min<size_t>(100, times.size());
                cell.ave_max_time =
                    std::accumulate(times.begin(), times.begin() + top, 0.0) / top;
            }
            cell.out_of_region_rate /= std::max<long>(cell.trials, 1);
            cell.mean_iterations = iter_sum / std::max<long>(cell.trials, 1);
            cell.failure_rate =
                static_cast<double>(cell.solver_failures) / std::max<long>(cell.trials, 1);
            result.cells.push_back(std::move(cell));
        }
    }
    return result;
}

namespace {
const char* kCsvHeader =
    "method,ebn0_db,snr,trials,bits,bit_errors,ber,symbols,symbol_errors,ser,"
    "ave_time,max_time,ave_max_time,out_of_region_rate,mean_iterations,"
    "solver_failures,failure_rate";
}

void emit_csv(const SimResult& result, std::ostream& out) {
    out << kCsvHeader << "\n";
    out.precision(17);
    for (const auto& c : result.cells) {
        out << c.method << "," << c.ebn0_db << "," << c.snr << "," << c.trials << "," << c.bits
            << "," << c.bit_errors << "," << c.ber << "," << c.symbols << "," << c.symbol_errors
            << "," << c.ser << "," << c.ave_time << "," << c.max_time << "," << c.ave_max_time
            << "," << c.out_of_region_rate << "," << c.mean_iterations << ","
            << c.solver_failures << "," << c.failure_rate << "\n";
    }
}

SimResult parse_csv(std::istream& in) {
    SimResult r;
    std::string line;
    if (!std::getline(in, line)) throw std::invalid_argument("parse_csv: empty input");
    if (line != kCsvHeader) throw std::invalid_argument("parse_csv: unexpected header");
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::string field;
        std::vector<std::string> fields;
        while (std::getline(ls, field, ',')) fields.push_back(field);
        if (fields.size() != 17) throw std::invalid_argument("parse_csv: bad row");
        CellStats c;
        c.method = fields[0];
        c.ebn0_db = std::stod(fields[1]);
        c.snr = std::stod(fields[2]);
        c.trials = std::stol(fields[3]);
        c.bits = std::stol(fields[4]);
        c.bit_errors = std::stol(fields[5]);
        c.ber = std::stod(fields[6]);
        c.symbols = std::stol(fields[7]);
        c.symbol_errors = std::stol(fields[8]);
        c.ser = std::stod(fields[9]);
        c.ave_time = std::stod(fields[10]);
        c.max_time = std::stod(fields[11]);
        c.ave_max_time = std::stod(fields[12]);
        c.out_of_region_rate = std::stod(fields[13]);
        c.mean_iterations = std::stod(fields[14]);
        c.solver_failures = std::stol(fields[15]);
        c.failure_rate = std::stod(fields[16]);
        r.cells.push_back(std::move(c));
    }
    return r;
}

}  // namespace sdmimo
