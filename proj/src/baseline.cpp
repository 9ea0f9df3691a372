#include "sdmimo/baseline.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace sdmimo {

namespace {

// Which real dimensions each block feeds, and the candidate value vectors on
// those dimensions. Blocks must partition the dimensions.
struct BlockGeometry {
    std::vector<std::vector<int>> dims;  // per block, sorted
    std::vector<Mat> values;             // per block: dims.size() x K_p
};

BlockGeometry block_geometry(const ExpansionStructure& e) {
    BlockGeometry g;
    const int nrows = e.rows();
    std::vector<int> owner(static_cast<size_t>(nrows), -1);
    for (int p = 0; p < e.layout.blocks(); ++p) {
        std::vector<int> dims;
        for (int r = 0; r < nrows; ++r) {
            bool nonzero = false;
            for (int j = e.layout.offsets[p]; j < e.layout.offsets[p + 1]; ++j)
                nonzero = nonzero || e.coeff(r, j) != 0.0;
            if (nonzero) {
                if (owner[static_cast<size_t>(r)] >= 0)
                    throw std::invalid_argument("expansion blocks overlap on a dimension");
                owner[static_cast<size_t>(r)] = p;
                dims.push_back(r);
            }
        }
        Mat w(static_cast<int>(dims.size()), e.layout.sizes[p]);
        for (size_t d = 0; d < dims.size(); ++d)
            for (int j = 0; j < e.layout.sizes[p]; ++j)
                w(static_cast<int>(d), j) = e.coeff(dims[d], e.layout.offsets[p] + j);
        g.dims.push_back(std::move(dims));
        g.values.push_back(std::move(w));
    }
    for (int r = 0; r < nrows; ++r)
        if (owner[static_cast<size_t>(r)] < 0)
            throw std::invalid_argument("expansion leaves a dimension unconstrained");
    return g;
}

long candidate_count(const BlockLayout& layout) {
    long count = 1;
    for (int k : layout.sizes) {
        count *= k;
        if (count > kExhaustiveGuard) return count;
    }
    return count;
}

}  // namespace

DecodeResult exhaustive_ml(const Mat& channel, const Vec& received,
                           const ExpansionStructure& expansion) {
    if (candidate_count(expansion.layout) > kExhaustiveGuard)
        throw std::invalid_argument("exhaustive_ml: candidate count exceeds guard");
    const BlockLayout& layout = expansion.layout;
    Mat hs = channel * expansion.coeff;

    std::vector<int> choice(static_cast<size_t>(layout.blocks()), 0);
    std::vector<int> best_choice = choice;
    double best = std::numeric_limits<double>::infinity();
    Vec residual = received;

    // depth-first over blocks; candidate order gives lowest-index tie wins
    auto dfs = [&](auto&& self, int p) -> void {
        if (p == layout.blocks()) {
            double d = residual.squaredNorm();
            if (d < best) {
                best = d;
                best_choice = choice;
            }
            return;
        }
        for (int j = 0; j < layout.sizes[p]; ++j) {
            choice[static_cast<size_t>(p)] = j;
            residual -= hs.col(layout.offsets[p] + j);
            self(self, p + 1);
            residual += hs.col(layout.offsets[p] + j);
        }
    };
    dfs(dfs, 0);

    DecodeResult result;
    result.u = selector_from_choices(best_choice, layout);
    result.x = expansion.symbol_vector(result.u);
    result.objective = best;
    result.method = "exhaustive";
    result.point_choice = best_choice;
    return result;
}

DecodeResult sphere_decode(const Mat& channel, const Vec& received,
                           const ExpansionStructure& expansion, double initial_radius) {
    const BlockLayout& layout = expansion.layout;
    const int n = static_cast<int>(channel.cols());
    BlockGeometry geom = block_geometry(expansion);

    // permute dimensions so each block's dimensions are contiguous
    std::vector<int> perm;
    std::vector<int> block_off;  // first permuted column of each block
    for (int p = 0; p < layout.blocks(); ++p) {
        block_off.push_back(static_cast<int>(perm.size()));
        perm.insert(perm.end(), geom.dims[static_cast<size_t>(p)].begin(),
                    geom.dims[static_cast<size_t>(p)].end());
    }
    Mat hp(channel.rows(), n);
    for (int c = 0; c < n; ++c) hp.col(c) = channel.col(perm[static_cast<size_t>(c)]);

    Eigen::HouseholderQR<Mat> qr(hp);
    Mat rfull = qr.matrixQR().topRows(n).triangularView<Eigen::Upper>();
    double diag_min = rfull.diagonal().cwiseAbs().minCoeff();
    if (diag_min < 1e-10 * std::max(1.0, rfull.diagonal().cwiseAbs().maxCoeff())) {
        DecodeResult fb = exhaustive_ml(channel, received, expansion);
        fb.method = "sphere(exhaustive-fallback)";
        fb.flagged = true;
        return fb;
    }
    Mat thin_q = qr.householderQ() * Mat::Identity(channel.rows(), n);
    Vec bvec = thin_q.transpose() * received;
    double offset = received.squaredNorm() - bvec.squaredNorm();

    double best = initial_radius;
    bool found = false;
    std::vector<int> choice(static_cast<size_t>(layout.blocks()), 0);
    std::vector<int> best_choice = choice;
    Vec xperm = Vec::Zero(n);
    long nodes = 0;

    auto descend = [&](auto&& self, int p, double dist) -> void {
        const int off = block_off[static_cast<size_t>(p)];
        const Mat& w = geom.values[static_cast<size_t>(p)];
        const int d = static_cast<int>(w.rows());
        const int k = layout.sizes[p];

        Vec base(d);
        for (int i = 0; i < d; ++i) {
            double acc = bvec[off + i];
            for (int c = off + d; c < n; ++c) acc -= rfull(off + i, c) * xperm[c];
            base[i] = acc;
        }
        std::vector<std::pair<double, int>> order(static_cast<size_t>(k));
        for (int j = 0; j < k; ++j) {
            double inc = 0.0;
            for (int i = 0; i < d; ++i) {
                double v = base[i];
                for (int i2 = i; i2 < d; ++i2) v -= rfull(off + i, off + i2) * w(i2, j);
                inc += v * v;
            }
            order[static_cast<size_t>(j)] = {inc, j};
        }
        nodes += k;
        std::sort(order.begin(), order.end());

        for (auto [inc, j] : order) {
            double nd = dist + inc;
            if (nd >= best) break;  // sorted: nothing further can improve
            choice[static_cast<size_t>(p)] = j;
            if (p == 0) {
                best = nd;
                best_choice = choice;
                found = true;
            } else {
                for (int i = 0; i < d; ++i) xperm[off + i] = w(i, j);
                self(self, p - 1, nd);
            }
        }
    };
    descend(descend, layout.blocks() - 1, 0.0);

    DecodeResult result;
    result.method = "sphere";
    result.nodes = nodes;
    if (!found) {
        result.flagged = true;
        result.objective = std::numeric_limits<double>::infinity();
        return result;
    }
    result.u = selector_from_choices(best_choice, layout);
    result.x = expansion.symbol_vector(result.u);
    result.objective = best + offset;
    result.point_choice = best_choice;
    return result;
}

DecodeResult zero_forcing(const SystemInstance& inst, const ExpansionStructure& expansion) {
    const BlockLayout& layout = expansion.layout;
    Eigen::JacobiSVD<Mat> svd(inst.channel, Eigen::ComputeThinU | Eigen::ComputeThinV);
    DecodeResult result;
    result.method = "zf";
    double smax = svd.singularValues().maxCoeff();
    double smin = svd.singularValues().minCoeff();
    if (smin <= 0.0 || smax / smin > 1e12) result.flagged = true;

    Vec x_ls = svd.solve(inst.received);
    BlockGeometry geom = block_geometry(expansion);
    std::vector<int> choice(static_cast<size_t>(layout.blocks()), 0);
    for (int p = 0; p < layout.blocks(); ++p) {
        const auto& dims = geom.dims[static_cast<size_t>(p)];
        const Mat& w = geom.values[static_cast<size_t>(p)];
        int best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (int j = 0; j < layout.sizes[p]; ++j) {
            double dd = 0.0;
            for (size_t i = 0; i < dims.size(); ++i) {
                double diff = x_ls[dims[i]] - w(static_cast<int>(i), j);
                dd += diff * diff;
            }
            if (dd < best_d) {
                best_d = dd;
                best = j;
            }
        }
        choice[static_cast<size_t>(p)] = best;
    }
    result.u = selector_from_choices(choice, layout);
    result.x = expansion.symbol_vector(result.u);
    result.objective = (inst.received - inst.channel * result.x).squaredNorm();
    result.point_choice = choice;
    return result;
}

}  // namespace sdmimo
