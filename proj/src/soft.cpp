#include "sdmimo/soft.hpp"

#include <cmath>
#include <ostream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace sdmimo {

HardSolver exhaustive_solver() {
    return [](const Mat& h, const Vec& y, const ExpansionStructure& e) {
        return exhaustive_ml(h, y, e);
    };
}

HardSolver sphere_solver() {
    return [](const Mat& h, const Vec& y, const ExpansionStructure& e) {
        return sphere_decode(h, y, e);
    };
}

HardSolver sdp_solver(ModelTier tier, const RoundingConfig& rounding, const SolverConfig& solver) {
    return [=](const Mat& h, const Vec& y, const ExpansionStructure& e) {
        return sdp_detect(h, y, e, tier, rounding, solver);
    };
}

ExpansionStructure constrained_expansion(const ExpansionStructure& expansion, int bit_index,
                                         int value, const Constellation& c) {
    const int n_bits = c.n_bits;
    const int blocks = expansion.layout.blocks();
    if (bit_index < 0 || bit_index >= blocks * n_bits)
        throw std::invalid_argument("constrained_expansion: bit index out of range");
    const int target_block = bit_index / n_bits;
    const int bit_pos = bit_index % n_bits;

    std::vector<int> sizes = expansion.layout.sizes;
    std::vector<std::vector<int>> keep(static_cast<size_t>(blocks));
    for (int p = 0; p < blocks; ++p) {
        const auto& idx = expansion.point_index.at(static_cast<size_t>(p));
        for (int j = 0; j < expansion.layout.sizes[p]; ++j) {
            if (p == target_block && c.labels[static_cast<size_t>(idx[static_cast<size_t>(j)])]
                                             [static_cast<size_t>(bit_pos)] != value)
                continue;
            keep[static_cast<size_t>(p)].push_back(j);
        }
        sizes[static_cast<size_t>(p)] = static_cast<int>(keep[static_cast<size_t>(p)].size());
        if (sizes[static_cast<size_t>(p)] == 0)
            throw std::invalid_argument("constrained_expansion: empty candidate set");
    }

    ExpansionStructure out;
    out.layout = BlockLayout(sizes);
    out.coeff = Mat::Zero(expansion.rows(), out.layout.total());
    out.selection = Mat::Zero(blocks, out.layout.total());
    out.point_index.assign(static_cast<size_t>(blocks), {});
    for (int p = 0; p < blocks; ++p) {
        for (size_t jj = 0; jj < keep[static_cast<size_t>(p)].size(); ++jj) {
            int src = expansion.layout.offsets[p] + keep[static_cast<size_t>(p)][jj];
            int dst = out.layout.offsets[p] + static_cast<int>(jj);
            out.coeff.col(dst) = expansion.coeff.col(src);
            out.selection(p, dst) = 1.0;
            out.point_index[static_cast<size_t>(p)].push_back(
                expansion.point_index[static_cast<size_t>(p)]
                                     [static_cast<size_t>(keep[static_cast<size_t>(p)][jj])]);
        }
    }
    return out;
}

LlrResult soft_decode(const SystemInstance& inst, const SoftConfig& config) {
    const Constellation& c = inst.constellation;
    ExpansionStructure expansion = instance_expansion(inst);
    const int blocks = expansion.layout.blocks();
    const int total_bits = blocks * c.n_bits;
    if (config.prior_llr.size() != 0) {
        if (config.prior_llr.size() != total_bits || config.prior_llr.cwiseAbs().maxCoeff() != 0.0)
            throw std::invalid_argument("soft_decode: only zero priors are supported");
    }
    const double sigma2 = 1.0 / inst.snr;

    LlrResult out;
    out.llr = Vec::Zero(total_bits);
    out.per_bit_objectives.assign(static_cast<size_t>(total_bits), {0.0, 0.0});
    out.subproblem_status.assign(static_cast<size_t>(total_bits), 0);
    out.prior_llr = Vec::Zero(total_bits);

    DecodeResult hard = config.solver(inst.channel, inst.received, expansion);
    out.hard_u = hard.u;
    out.solved_subproblems = 1;
    out.hard_bits = selector_to_bits(hard.u, expansion, c);
    const std::vector<int>& hard_bits = out.hard_bits;
    const double hard_d2 = hard.objective;

    int solves = 0;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic) reduction(+ : solves) if (config.parallel)
#endif
    for (int k = 0; k < total_bits; ++k) {
        const int opposite = 1 - hard_bits[static_cast<size_t>(k)];
        ExpansionStructure sub = constrained_expansion(expansion, k, opposite, c);
        double d2_opp;
        int status = 0;
        try {
            DecodeResult res = config.solver(inst.channel, inst.received, sub);
            if (res.solver_failed) throw std::runtime_error("subproblem solver failed");
            d2_opp = res.objective;
        } catch (const std::exception&) {
            if (config.fallback_exhaustive) {
                d2_opp = exhaustive_ml(inst.channel, inst.received, sub).objective;
                status = 1;
            } else {
                d2_opp = hard_d2;  // neutral: LLR 0
                status = 2;
            }
        }
        ++solves;
        double d0 = hard_bits[static_cast<size_t>(k)] == 0 ? hard_d2 : d2_opp;
        double d1 = hard_bits[static_cast<size_t>(k)] == 1 ? hard_d2 : d2_opp;
        out.per_bit_objectives[static_cast<size_t>(k)] = {d0, d1};
        double llr = (d0 - d1) / (2.0 * sigma2);
        out.llr[k] = std::clamp(llr, -config.clamp, config.clamp);
        out.subproblem_status[static_cast<size_t>(k)] = status;
    }
    out.solved_subproblems += solves;
    return out;
}

void write_llr_csv(const LlrResult& r, long trial, std::ostream& out, bool header) {
    if (header) out << "trial,bit_index,llr,hard_bit,subproblem_status\n";
    out.precision(12);
    for (int k = 0; k < r.llr.size(); ++k) {
        out << trial << "," << k << "," << r.llr[k] << "," << r.hard_bits[static_cast<size_t>(k)]
            << "," << r.subproblem_status[static_cast<size_t>(k)] << "\n";
    }
}

}  // namespace sdmimo
