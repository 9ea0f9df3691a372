#include "sdmimo/relax.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <sstream>

namespace sdmimo {

BqpProblem build_bqp(const Mat& channel, const Vec& received, const ExpansionStructure& expansion) {
    if (channel.cols() != expansion.coeff.rows() || channel.rows() != received.size())
        throw std::invalid_argument("build_bqp: dimension mismatch");
    BqpProblem bqp;
    Mat hs = channel * expansion.coeff;
    bqp.q = hs.transpose() * hs;
    bqp.c = -hs.transpose() * received;
    const int n = bqp.n();
    bqp.lq = Mat::Zero(n + 1, n + 1);
    bqp.lq.block(0, 1, 1, n) = bqp.c.transpose();
    bqp.lq.block(1, 0, n, 1) = bqp.c;
    bqp.lq.block(1, 1, n, n) = bqp.q;
    bqp.layout = expansion.layout;
    return bqp;
}

Mat projection_v(int k) {
    if (k < 2) throw std::invalid_argument("projection_v: k must be >= 2");
    Mat v = Mat::Zero(k, k - 1);
    v.topRows(k - 1) = Mat::Identity(k - 1, k - 1);
    v.row(k - 1) = -Vec::Ones(k - 1).transpose();
    return v;
}

Mat projection_f(int k, int n) {
    Mat e = Mat::Ones(k, n);
    return (e - projection_v(k) * Mat::Ones(k - 1, n)) / static_cast<double>(k);
}

Mat reconstruct_column_stochastic(const Mat& z, int k, int n) {
    if (z.rows() != k - 1 || z.cols() != n)
        throw std::invalid_argument("reconstruct_column_stochastic: Z must be (K-1) x N");
    return projection_f(k, n) + projection_v(k) * z;
}

ProjectionBasis build_projection(const BlockLayout& layout) {
    for (int k : layout.sizes)
        if (k < 2) throw std::invalid_argument("build_projection: block sizes must be >= 2");
    ProjectionBasis basis;
    basis.layout = layout;
    const int n = layout.total();
    const int blocks = layout.blocks();
    int m = 1;
    for (int k : layout.sizes) m += k - 1;
    basis.m = m;

    // W = [ f | blkdiag(V_p) ] with f = vec of the per-block F columns
    basis.w = Mat::Zero(n, m);
    int red = 1;  // reduced column cursor, column 0 is the homogenization one
    for (int p = 0; p < blocks; ++p) {
        const int k = layout.sizes[p];
        const int off = layout.offsets[p];
        basis.w(off + k - 1, 0) = 1.0;  // F column: zeros then a single one
        basis.w.block(off, red, k, k - 1) = projection_v(k);
        red += k - 1;
    }
    basis.v_hat = Mat::Zero(n + 1, m);
    basis.v_hat(0, 0) = 1.0;
    basis.v_hat.bottomRows(n) = basis.w;

    basis.t = Mat::Zero(blocks, n + 1);
    basis.t.col(0) = -Vec::Ones(blocks);
    for (int p = 0; p < blocks; ++p)
        for (int i = layout.offsets[p]; i < layout.offsets[p + 1]; ++i) basis.t(p, i + 1) = 1.0;
    return basis;
}

Vec ProjectionBasis::reduced_point(const VecI& u) const {
    if (!valid_selector(u, layout)) throw std::invalid_argument("reduced_point: invalid selector");
    Vec p = Vec::Zero(m);
    p[0] = 1.0;
    int red = 1;
    for (int b = 0; b < layout.blocks(); ++b) {
        const int k = layout.sizes[b];
        const int off = layout.offsets[b];
        for (int j = 0; j + 1 < k; ++j) p[red + j] = u[off + j];
        red += k - 1;
    }
    return p;
}

GangsterIndex gangster_indices(const BlockLayout& layout) {
    GangsterIndex g;
    const int blocks = layout.blocks();
    for (int p = 0; p < blocks; ++p) {
        const int off = layout.offsets[p];
        const int k = layout.sizes[p];
        for (int q = 0; q < k; ++q)
            for (int r = q + 1; r < k; ++r) g.j.emplace_back(off + q + 1, off + r + 1);
    }
    g.j_bar = g.j;
    g.j_bar.insert(g.j_bar.begin(), {0, 0});
    // cross-block entries; first-row and diagonal entries are fixed by the
    // equalities plus semidefiniteness, so only these carry new information
    for (int p = 0; p < blocks; ++p)
        for (int q = p + 1; q < blocks; ++q)
            for (int i = layout.offsets[p]; i < layout.offsets[p + 1]; ++i)
                for (int j = layout.offsets[q]; j < layout.offsets[q + 1]; ++j)
                    g.j_hat.emplace_back(i + 1, j + 1);
    return g;
}

Mat gangster_apply(const Mat& y, const std::vector<std::pair<int, int>>& idx) {
    Mat out = Mat::Zero(y.rows(), y.cols());
    for (auto [i, j] : idx) {
        out(i, j) = y(i, j);
        out(j, i) = y(j, i);
    }
    return out;
}

Mat barycenter(const BlockLayout& layout) {
    const int n = layout.total();
    const int blocks = layout.blocks();
    Mat y = Mat::Zero(n + 1, n + 1);
    y(0, 0) = 1.0;
    for (int p = 0; p < blocks; ++p) {
        const double kp = layout.sizes[p];
        for (int i = layout.offsets[p]; i < layout.offsets[p + 1]; ++i) {
            y(0, i + 1) = y(i + 1, 0) = 1.0 / kp;
            y(i + 1, i + 1) = 1.0 / kp;
        }
        for (int q = 0; q < blocks; ++q) {
            if (q == p) continue;
            const double kq = layout.sizes[q];
            for (int i = layout.offsets[p]; i < layout.offsets[p + 1]; ++i)
                for (int j = layout.offsets[q]; j < layout.offsets[q + 1]; ++j)
                    y(i + 1, j + 1) = 1.0 / (kp * kq);
        }
    }
    return y;
}

Mat interior_point(const BlockLayout& layout) {
    // expectation of [1; x][1 x^T] over uniform truncated selectors x
    ProjectionBasis basis = build_projection(layout);
    const int m = basis.m;
    Mat r = Mat::Zero(m, m);
    r(0, 0) = 1.0;
    int red_p = 1;
    for (int p = 0; p < layout.blocks(); ++p) {
        const int kp = layout.sizes[p];
        const double inv_kp = 1.0 / kp;
        for (int a = 0; a < kp - 1; ++a) {
            r(0, red_p + a) = r(red_p + a, 0) = inv_kp;
            r(red_p + a, red_p + a) = inv_kp;
        }
        int red_q = 1;
        for (int q = 0; q < layout.blocks(); ++q) {
            const int kq = layout.sizes[q];
            if (q != p) {
                const double cross = 1.0 / (kp * kq);
                for (int a = 0; a < kp - 1; ++a)
                    for (int b = 0; b < kq - 1; ++b) r(red_p + a, red_q + b) = cross;
            }
            red_q += kq - 1;
        }
        red_p += kp - 1;
    }
    return r;
}

namespace {

std::vector<std::pair<int, int>> pick_inequalities(const GangsterIndex& g, int budget,
                                                   const Mat* y_prior) {
    if (budget == kAllInequalities || budget >= static_cast<int>(g.j_hat.size())) return g.j_hat;
    if (budget <= 0) return {};
    std::vector<std::pair<int, int>> ordered = g.j_hat;
    if (y_prior != nullptr) {
        const Mat& y = *y_prior;
        std::stable_sort(ordered.begin(), ordered.end(), [&](auto a, auto b) {
            double va = y(a.first, a.second), vb = y(b.first, b.second);
            if (va != vb) return va < vb;  // most negative first
            return a < b;
        });
    }
    ordered.resize(static_cast<size_t>(budget));
    std::sort(ordered.begin(), ordered.end());
    return ordered;
}

}  // namespace

namespace {

// In the projected space some equalities can coincide (for K = 2 the
// diagonal-equals-first-row rows of a block collapse pairwise); keep a
// maximal independent subset so the solver sees a full-rank system.
void prune_dependent(std::vector<LiftedConstraint>& eqs, const ProjectionBasis& basis) {
    const int m = basis.m;
    std::vector<Vec> ortho;
    std::vector<LiftedConstraint> kept;
    for (const auto& eq : eqs) {
        Mat a = Mat::Zero(m, m);
        for (const auto& t : eq.terms) {
            Vec vi = basis.v_hat.row(t.i).transpose();
            Vec vj = basis.v_hat.row(t.j).transpose();
            a += 0.5 * t.w * (vi * vj.transpose() + vj * vi.transpose());
        }
        Vec v = Eigen::Map<Vec>(a.data(), m * m);
        double norm0 = v.norm();
        for (const auto& o : ortho) v -= o.dot(v) * o;
        if (v.norm() > 1e-10 * std::max(1.0, norm0)) {
            ortho.push_back(v / v.norm());
            kept.push_back(eq);
        }
    }
    eqs = std::move(kept);
}

}  // namespace

SdpModel assemble_model(const BqpProblem& bqp, ModelTier tier, int ineq_budget,
                        const Mat* y_prior) {
    SdpModel model;
    model.tier = tier;
    model.basis = build_projection(bqp.layout);
    model.m = model.basis.m;
    model.objective = model.basis.v_hat.transpose() * bqp.lq * model.basis.v_hat;
    model.objective = (0.5 * (model.objective + model.objective.transpose())).eval();

    GangsterIndex g = gangster_indices(bqp.layout);
    if (tier == ModelTier::ii) {
        // diag(Y) = (1, Y_{0,1:n})
        model.equalities.push_back({{{0, 0, 1.0}}, 1.0});
        for (int i = 1; i <= bqp.n(); ++i)
            model.equalities.push_back({{{i, i, 1.0}, {0, i, -1.0}}, 0.0});
        prune_dependent(model.equalities, model.basis);
    } else {
        for (auto [i, j] : g.j_bar)
            model.equalities.push_back({{{i, j, 1.0}}, (i == 0 && j == 0) ? 1.0 : 0.0});
        if (tier == ModelTier::iv)
            model.inequalities = pick_inequalities(g, ineq_budget, y_prior);
    }
    return model;
}

void dump_model(const SdpModel& model, std::ostream& out) {
    out.precision(17);
    int tier_num = model.tier == ModelTier::ii ? 2 : (model.tier == ModelTier::iii ? 3 : 4);
    out << "sdmimo-model " << model.m << " " << tier_num << " " << model.equalities.size() << " "
        << model.inequalities.size() << "\n";
    out << "blocks";
    for (int k : model.basis.layout.sizes) out << " " << k;
    out << "\n";
    for (int i = 0; i < model.m; ++i) {
        for (int j = 0; j < model.m; ++j) out << model.objective(i, j) << (j + 1 < model.m ? " " : "\n");
    }
    for (const auto& eq : model.equalities) {
        out << "eq " << eq.terms.size();
        for (const auto& t : eq.terms) out << " " << t.i << " " << t.j << " " << t.w;
        out << " " << eq.rhs << "\n";
    }
    for (auto [i, j] : model.inequalities) out << "ineq " << i << " " << j << "\n";
}

SdpModel load_model(std::istream& in) {
    std::string magic;
    int m = 0, tier_num = 0;
    size_t n_eq = 0, n_ineq = 0;
    in >> magic >> m >> tier_num >> n_eq >> n_ineq;
    if (magic != "sdmimo-model") throw std::invalid_argument("load_model: bad header");
    std::string tok;
    in >> tok;
    if (tok != "blocks") throw std::invalid_argument("load_model: expected blocks line");
    std::string rest;
    std::getline(in, rest);
    std::istringstream bs(rest);
    std::vector<int> sizes;
    int k;
    while (bs >> k) sizes.push_back(k);
    SdpModel model;
    model.tier = tier_num == 2 ? ModelTier::ii : (tier_num == 3 ? ModelTier::iii : ModelTier::iv);
    model.basis = build_projection(BlockLayout(sizes));
    model.m = m;
    if (model.basis.m != m) throw std::invalid_argument("load_model: m/blocks mismatch");
    model.objective.resize(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) in >> model.objective(i, j);
    for (size_t e = 0; e < n_eq; ++e) {
        size_t nt = 0;
        in >> tok >> nt;
        if (tok != "eq") throw std::invalid_argument("load_model: expected eq line");
        LiftedConstraint c;
        for (size_t t = 0; t < nt; ++t) {
            LinearTerm term{};
            in >> term.i >> term.j >> term.w;
            c.terms.push_back(term);
        }
        in >> c.rhs;
        model.equalities.push_back(std::move(c));
    }
    for (size_t e = 0; e < n_ineq; ++e) {
        int i = 0, j = 0;
        in >> tok >> i >> j;
        if (tok != "ineq") throw std::invalid_argument("load_model: expected ineq line");
        model.inequalities.emplace_back(i, j);
    }
    if (!in) throw std::invalid_argument("load_model: truncated input");
    return model;
}

}  // namespace sdmimo
