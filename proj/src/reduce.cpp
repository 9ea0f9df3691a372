#include "sdmimo/reduce.hpp"

#include <Eigen/SVD>

#include <cmath>

namespace sdmimo {

namespace {

// Gram-Schmidt data of the current column basis.
struct Gso {
    Mat bstar;   // orthogonalized columns
    Mat mu;      // mu(i,j) for j < i
    Vec norms2;  // ||b*_i||^2
};

Gso gram_schmidt(const Mat& b) {
    const int n = static_cast<int>(b.cols());
    Gso g;
    g.bstar = b;
    g.mu = Mat::Zero(n, n);
    g.norms2.resize(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < i; ++j) {
            g.mu(i, j) = b.col(i).dot(g.bstar.col(j)) / g.norms2[j];
            g.bstar.col(i) -= g.mu(i, j) * g.bstar.col(j);
        }
        g.norms2[i] = g.bstar.col(i).squaredNorm();
        if (g.norms2[i] <= 0.0) throw std::invalid_argument("lll_reduce: rank-deficient basis");
    }
    return g;
}

}  // namespace

LllResult lll_reduce(const Mat& h, double delta) {
    if (delta <= 0.25 || delta > 1.0)
        throw std::invalid_argument("lll_reduce: delta must be in (1/4, 1]");
    if (h.rows() < h.cols()) throw std::invalid_argument("lll_reduce: wide matrix");

    const int n = static_cast<int>(h.cols());
    Mat b = h;
    Mat q = Mat::Identity(n, n);
    Gso g = gram_schmidt(b);

    auto size_reduce = [&](int i, int j) {
        double r = std::round(g.mu(i, j));
        if (r == 0.0) return;
        b.col(i) -= r * b.col(j);
        q.col(i) -= r * q.col(j);
        for (int l = 0; l < j; ++l) g.mu(i, l) -= r * g.mu(j, l);
        g.mu(i, j) -= r;
    };

    int k = 1;
    long safety = 0;
    while (k < n) {
        if (++safety > 1000000) throw std::runtime_error("lll_reduce: iteration cap hit");
        size_reduce(k, k - 1);
        if (g.norms2[k] >= (delta - g.mu(k, k - 1) * g.mu(k, k - 1)) * g.norms2[k - 1]) {
            for (int j = k - 2; j >= 0; --j) size_reduce(k, j);
            ++k;
        } else {
            b.col(k).swap(b.col(k - 1));
            q.col(k).swap(q.col(k - 1));
            g = gram_schmidt(b);
            k = std::max(k - 1, 1);
        }
    }
    // integer cleanup of accumulated floating error in Q
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) q(i, j) = std::round(q(i, j));
    return {b, q};
}

bool is_unimodular(const Mat& q, double tol) {
    if (q.rows() != q.cols()) return false;
    for (int i = 0; i < q.rows(); ++i)
        for (int j = 0; j < q.cols(); ++j)
            if (std::abs(q(i, j) - std::round(q(i, j))) > tol) return false;
    return std::abs(std::abs(q.determinant()) - 1.0) < 1e-6;
}

bool lll_conditions_hold(const Mat& basis, double delta, double tol) {
    Gso g = gram_schmidt(basis);
    const int n = static_cast<int>(basis.cols());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(g.mu(i, j)) > 0.5 + tol) return false;
    for (int k = 1; k < n; ++k) {
        double lhs = g.norms2[k] + g.mu(k, k - 1) * g.mu(k, k - 1) * g.norms2[k - 1];
        if (lhs < (delta - tol) * g.norms2[k - 1]) return false;
    }
    return true;
}

VecI zf_initial(const Mat& basis, const Vec& y) {
    Eigen::JacobiSVD<Mat> svd(basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vec sol = svd.solve(y);
    VecI s(sol.size());
    for (int i = 0; i < sol.size(); ++i) s[i] = static_cast<int>(std::llround(sol[i]));
    return s;
}

ReducedSystem build_reduced(const SystemInstance& inst, int l_points, double delta) {
    if (l_points < 2) throw std::invalid_argument("build_reduced: need at least 2 window points");
    if (!inst.qam_mode || !inst.constellation.separable)
        throw std::invalid_argument("build_reduced: reduction needs a separable alphabet");
    auto pts = inst.constellation.real_points();
    const int k = static_cast<int>(pts.size());
    double scale = pts[1] - pts[0];
    for (int i = 0; i + 1 < k; ++i)
        if (std::abs((pts[static_cast<size_t>(i + 1)] - pts[static_cast<size_t>(i)]) - scale) >
            1e-9 * std::abs(scale))
            throw std::invalid_argument("build_reduced: alphabet must be uniformly spaced");

    ReducedSystem red;
    red.grid_scale = scale;
    red.grid_offset = pts[0];
    red.k_points = k;
    red.l_points = l_points;

    const int n = inst.real_dims();
    red.y_adjusted =
        (inst.received - red.grid_offset * inst.channel * Vec::Ones(n)) / red.grid_scale;

    LllResult lll = lll_reduce(inst.channel, delta);
    red.l_basis = lll.basis;
    red.q_unimodular = lll.unimodular;

    Eigen::JacobiSVD<Mat> svd(red.l_basis, Eigen::ComputeThinU | Eigen::ComputeThinV);
    double smin = svd.singularValues().minCoeff();
    double smax = svd.singularValues().maxCoeff();
    red.guard_tripped = (smin <= 0.0 || smax / smin > 1e12);

    Vec sol = svd.solve(red.y_adjusted);
    red.s_prime.resize(n);
    for (int i = 0; i < n; ++i) red.s_prime[i] = static_cast<int>(std::llround(sol[i]));

    red.window.resize(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) {
        // center-right placement: ceil(L/2)-1 integers below s', floor(L/2) above
        int lo = red.s_prime[i] - (l_points + 1) / 2 + 1;
        for (int j = 0; j < l_points; ++j) red.window[static_cast<size_t>(i)].push_back(lo + j);
    }
    return red;
}

ExpansionStructure build_reduced_expansion(const ReducedSystem& reduced) {
    const int n = static_cast<int>(reduced.window.size());
    const int l = reduced.l_points;
    ExpansionStructure e;
    e.layout = BlockLayout::uniform(l, n);
    e.coeff = Mat::Zero(n, n * l);
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < l; ++j)
            e.coeff(p, p * l + j) = static_cast<double>(reduced.window[static_cast<size_t>(p)][static_cast<size_t>(j)]);
    e.selection = Mat::Zero(n, n * l);
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < l; ++j) e.selection(p, p * l + j) = 1.0;
    return e;
}

DecodeResult map_back(const VecI& u_reduced, const ReducedSystem& reduced,
                      const SystemInstance& inst) {
    const int n = static_cast<int>(reduced.window.size());
    BlockLayout layout = BlockLayout::uniform(reduced.l_points, n);
    auto choice = choices_from_selector(u_reduced, layout);
    Vec gprime(n);
    for (int p = 0; p < n; ++p)
        gprime[p] = static_cast<double>(
            reduced.window[static_cast<size_t>(p)][static_cast<size_t>(choice[static_cast<size_t>(p)])]);
    Vec g = reduced.q_unimodular * gprime;

    DecodeResult result;
    result.method = "lll";
    result.x = reduced.grid_scale * g + reduced.grid_offset * Vec::Ones(n);
    result.point_choice.assign(static_cast<size_t>(n), -1);
    bool in_region = true;
    for (int p = 0; p < n; ++p) {
        long gi = std::llround(g[p]);
        if (gi >= 0 && gi < reduced.k_points)
            result.point_choice[static_cast<size_t>(p)] = static_cast<int>(gi);
        else
            in_region = false;
    }
    result.out_of_region = !in_region;
    if (in_region) {
        std::vector<int> pc(result.point_choice.begin(), result.point_choice.end());
        result.u = selector_from_choices(pc, BlockLayout::uniform(reduced.k_points, n));
    }
    result.objective = (inst.received - inst.channel * result.x).squaredNorm();
    return result;
}

}  // namespace sdmimo
