#include "sdmimo/solver.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <ostream>

namespace sdmimo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// One linear functional on R: sum_t w_t * sym(v_a v_b^T), rows referenced by
// slot into the table of distinct v_hat rows actually used by the model.
struct RTerm {
    int a, b;
    double w;
};
struct RConstraint {
    std::vector<RTerm> terms;
    double rhs = 0.0;
};

struct Workspace {
    int m = 0;  // order of the matrix variable
    int p = 0;  // equalities
    int q = 0;  // inequality (slack) rows
    Mat vrows;  // U x m, distinct v_hat rows
    std::vector<RConstraint> cons;  // equalities first, then inequality rows
    Vec b;                          // rhs vector, length p + q

    double con_value(const RConstraint& c, const Mat& x) const {
        double acc = 0.0;
        for (const auto& t : c.terms)
            acc += t.w * vrows.row(t.a).dot(x * vrows.row(t.b).transpose());
        return acc;
    }
    // accumulates sum_k y_k A_k into `out`
    void add_adjoint(const Vec& y, Mat& out) const {
        for (size_t k = 0; k < cons.size(); ++k) {
            double yk = y[static_cast<int>(k)];
            if (yk == 0.0) continue;
            for (const auto& t : cons[k].terms) {
                double w = 0.5 * t.w * yk;
                out.noalias() += w * vrows.row(t.a).transpose() * vrows.row(t.b);
                out.noalias() += w * vrows.row(t.b).transpose() * vrows.row(t.a);
            }
        }
    }
};

Workspace build_workspace(const SdpModel& model) {
    Workspace ws;
    ws.m = model.m;
    ws.p = static_cast<int>(model.equalities.size());
    ws.q = static_cast<int>(model.inequalities.size());
    std::vector<int> slot(static_cast<size_t>(model.basis.v_hat.rows()), -1);
    std::vector<int> order;
    auto use_row = [&](int i) {
        if (slot[static_cast<size_t>(i)] < 0) {
            slot[static_cast<size_t>(i)] = static_cast<int>(order.size());
            order.push_back(i);
        }
        return slot[static_cast<size_t>(i)];
    };
    ws.b = Vec::Zero(ws.p + ws.q);
    for (int k = 0; k < ws.p; ++k) {
        const auto& eq = model.equalities[static_cast<size_t>(k)];
        RConstraint rc;
        for (const auto& t : eq.terms) rc.terms.push_back({use_row(t.i), use_row(t.j), t.w});
        rc.rhs = eq.rhs;
        ws.b[k] = eq.rhs;
        ws.cons.push_back(std::move(rc));
    }
    for (int j = 0; j < ws.q; ++j) {
        auto [a, bidx] = model.inequalities[static_cast<size_t>(j)];
        RConstraint rc;
        rc.terms.push_back({use_row(a), use_row(bidx), 1.0});
        ws.cons.push_back(std::move(rc));
    }
    ws.vrows.resize(static_cast<int>(order.size()), ws.m);
    for (size_t u = 0; u < order.size(); ++u)
        ws.vrows.row(static_cast<int>(u)) = model.basis.v_hat.row(order[u]);
    return ws;
}

// largest alpha keeping X + alpha*D positive semidefinite (X positive definite)
double max_step_sdp(const Eigen::LLT<Mat>& llt, const Mat& d) {
    Mat l = llt.matrixL();
    Mat w = l.triangularView<Eigen::Lower>().solve(d);
    w = l.triangularView<Eigen::Lower>().solve(w.transpose()).transpose();
    w = (0.5 * (w + w.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(w, Eigen::EigenvaluesOnly);
    double lmin = es.eigenvalues().minCoeff();
    if (lmin >= -1e-14) return kInf;
    return -1.0 / lmin;
}

double max_step_lp(const Vec& s, const Vec& ds) {
    double a = kInf;
    for (int j = 0; j < s.size(); ++j)
        if (ds[j] < 0.0) a = std::min(a, -s[j] / ds[j]);
    return a;
}

struct Direction {
    Mat dx, dz;
    Vec dy, ds, dzs;
};

}  // namespace

SdpSolution solve(const SdpModel& model, const SolverConfig& config, const Mat* warm_start) {
    Workspace ws = build_workspace(model);
    const int m = ws.m;
    const int p = ws.p;
    const int q = ws.q;
    const int total = p + q;
    const Mat& c = model.objective;
    const double c_norm = 1.0 + c.norm();
    const double b_norm = 1.0 + ws.b.norm();

    SdpSolution sol;

    Mat x = Mat::Identity(m, m);
    if (warm_start != nullptr) {
        Mat blended =
            (1.0 - config.warm_blend) * (*warm_start) + config.warm_blend * Mat::Identity(m, m);
        if (Eigen::LLT<Mat>(blended).info() == Eigen::Success) x = blended;
    }
    double zscale = std::max(1.0, c.norm() / std::sqrt(static_cast<double>(m)));
    Mat z = zscale * Mat::Identity(m, m);
    Vec y = Vec::Zero(total);
    Vec s(q), zs(q);
    for (int j = 0; j < q; ++j) {
        s[j] = std::max(ws.con_value(ws.cons[static_cast<size_t>(p + j)], x), 1e-2);
        zs[j] = zscale;
    }

    int stall = 0;
    int no_improve = 0;
    double best_merit = std::numeric_limits<double>::infinity();
    Mat best_x = x;
    double best_gap = 0.0, best_feas = 0.0;

    auto finalize = [&](SolveStatus status, int iter, bool use_best) {
        sol.status = status;
        sol.iterations = iter;
        const Mat& xr = use_best ? best_x : x;
        sol.r = 0.5 * (xr + xr.transpose());
        if (use_best) {
            sol.gap = best_gap;
            sol.feas_residual = best_feas;
        }
        sol.y_lift = model.basis.lift(sol.r);
        sol.lower_bound = (c.array() * sol.r.array()).sum();
        return sol;
    };

    for (int iter = 0; iter <= config.max_iter; ++iter) {
        Vec ax(total);
        for (int k = 0; k < total; ++k) ax[k] = ws.con_value(ws.cons[static_cast<size_t>(k)], x);
        for (int j = 0; j < q; ++j) ax[p + j] -= s[j];
        Vec rp = ws.b - ax;
        Mat aty = Mat::Zero(m, m);
        ws.add_adjoint(y, aty);
        Mat rd = c - aty - z;
        Vec rds(q);
        for (int j = 0; j < q; ++j) rds[j] = y[p + j] - zs[j];

        double pobj = (c.array() * x.array()).sum();
        double dobj = ws.b.dot(y);
        double mu = ((x.array() * z.array()).sum() + s.dot(zs)) / static_cast<double>(m + q);
        double rel_gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
        double pfeas = rp.norm() / b_norm;
        double dfeas = std::sqrt(rd.squaredNorm() + rds.squaredNorm()) / c_norm;
        double feas = std::max(pfeas, dfeas);

        if (config.keep_trace) sol.trace.push_back({iter, pobj, dobj, rel_gap, feas});
        sol.gap = rel_gap;
        sol.feas_residual = feas;

        double merit = std::max(rel_gap, feas);
        if (std::isfinite(merit) && merit < best_merit) {
            best_merit = merit;
            best_x = x;
            best_gap = rel_gap;
            best_feas = feas;
            no_improve = 0;
        } else {
            ++no_improve;
        }

        if (rel_gap <= config.tol_gap && pfeas <= config.tol_feas && dfeas <= config.tol_feas)
            return finalize(SolveStatus::optimal, iter, false);
        if (iter == config.max_iter) return finalize(SolveStatus::max_iter, iter, true);
        if (!std::isfinite(mu) || !std::isfinite(feas))
            return finalize(SolveStatus::numerical_failure, iter, true);
        // bouncing at the floating-point floor: report the best iterate
        if (no_improve >= 10) return finalize(SolveStatus::max_iter, iter, true);

        Eigen::LLT<Mat> lltz(z), lltx(x);
        if (lltz.info() != Eigen::Success || lltx.info() != Eigen::Success)
            return finalize(SolveStatus::numerical_failure, iter, true);

        // tables over the distinct constraint rows: v_a^T Z^-1 v_b, v_a^T X v_b
        Mat ziv = lltz.solve(ws.vrows.transpose());
        Mat dz_tab = ws.vrows * ziv;
        Mat xv = ws.vrows * x;
        Mat dx_tab = xv * ws.vrows.transpose();

        Mat schur = Mat::Zero(total, total);
        for (int k = 0; k < total; ++k) {
            for (int l = k; l < total; ++l) {
                double acc = 0.0;
                for (const auto& tk : ws.cons[static_cast<size_t>(k)].terms)
                    for (const auto& tl : ws.cons[static_cast<size_t>(l)].terms)
                        acc += 0.25 * tk.w * tl.w *
                               (dx_tab(tl.b, tk.a) * dz_tab(tk.b, tl.a) +
                                dx_tab(tl.b, tk.b) * dz_tab(tk.a, tl.a) +
                                dx_tab(tl.a, tk.a) * dz_tab(tk.b, tl.b) +
                                dx_tab(tl.a, tk.b) * dz_tab(tk.a, tl.b));
                schur(k, l) = acc;
                schur(l, k) = acc;
            }
        }
        for (int j = 0; j < q; ++j) schur(p + j, p + j) += s[j] / zs[j];

        Eigen::LDLT<Mat> ldlt(schur);
        if (ldlt.info() != Eigen::Success) {
            Mat reg =
                schur + 1e-12 * schur.diagonal().maxCoeff() * Mat::Identity(total, total);
            ldlt.compute(reg);
            if (ldlt.info() != Eigen::Success)
                return finalize(SolveStatus::numerical_failure, iter, true);
        }

        auto solve_direction = [&](double sigmu, const Mat* corr, const Vec* corr_s,
                                   Direction& d) -> bool {
            // E = sigmu Z^-1 - X - Z^-1 Corr - Z^-1 Rd X
            Mat e = sigmu * lltz.solve(Mat::Identity(m, m)) - x - lltz.solve(rd * x);
            if (corr != nullptr) e -= lltz.solve(*corr);
            Mat esym = 0.5 * (e + e.transpose());
            Mat de_tab = (ws.vrows * esym) * ws.vrows.transpose();

            Vec h(total);
            for (int k = 0; k < total; ++k) {
                double ae = 0.0;
                for (const auto& t : ws.cons[static_cast<size_t>(k)].terms)
                    ae += t.w * de_tab(t.a, t.b);
                h[k] = rp[k] - ae;
            }
            for (int j = 0; j < q; ++j) {
                double cj = corr_s != nullptr ? (*corr_s)[j] : 0.0;
                h[p + j] += (sigmu - cj) / zs[j] - s[j] - (s[j] / zs[j]) * rds[j];
            }
            d.dy = ldlt.solve(h);
            if (!d.dy.allFinite()) return false;

            Mat adj = Mat::Zero(m, m);
            ws.add_adjoint(d.dy, adj);
            d.dz = rd - adj;
            d.dx = e + lltz.solve(adj * x);
            d.dx = (0.5 * (d.dx + d.dx.transpose())).eval();
            d.ds.resize(q);
            d.dzs.resize(q);
            for (int j = 0; j < q; ++j) {
                double cj = corr_s != nullptr ? (*corr_s)[j] : 0.0;
                d.dzs[j] = rds[j] + d.dy[p + j];
                d.ds[j] = (sigmu - cj) / zs[j] - s[j] - (s[j] / zs[j]) * d.dzs[j];
            }
            return d.dx.allFinite() && d.dz.allFinite();
        };

        Direction aff;
        if (!solve_direction(0.0, nullptr, nullptr, aff))
            return finalize(SolveStatus::numerical_failure, iter, true);
        double ap_aff = std::min({1.0, max_step_sdp(lltx, aff.dx), max_step_lp(s, aff.ds)});
        double ad_aff = std::min({1.0, max_step_sdp(lltz, aff.dz), max_step_lp(zs, aff.dzs)});
        double mu_aff =
            (((x + ap_aff * aff.dx).array() * (z + ad_aff * aff.dz).array()).sum() +
             (s + ap_aff * aff.ds).dot(zs + ad_aff * aff.dzs)) /
            static_cast<double>(m + q);
        double sigma = std::pow(std::max(mu_aff, 0.0) / mu, 3);
        sigma = std::clamp(sigma, 1e-10, 0.9999);

        Mat corr = aff.dz * aff.dx;
        Vec corr_s = aff.dzs.cwiseProduct(aff.ds);
        Direction dir;
        if (!solve_direction(sigma * mu, &corr, &corr_s, dir))
            return finalize(SolveStatus::numerical_failure, iter, true);

        double ap = std::min({1.0, config.step_fraction * max_step_sdp(lltx, dir.dx),
                              config.step_fraction * max_step_lp(s, dir.ds)});
        double ad = std::min({1.0, config.step_fraction * max_step_sdp(lltz, dir.dz),
                              config.step_fraction * max_step_lp(zs, dir.dzs)});
        if (ap < 1e-10 && ad < 1e-10) {
            if (++stall >= 3) return finalize(SolveStatus::max_iter, iter, true);
        } else {
            stall = 0;
        }

        Mat xn = x + ap * dir.dx;
        x = 0.5 * (xn + xn.transpose());
        s += ap * dir.ds;
        y += ad * dir.dy;
        Mat zn = z + ad * dir.dz;
        z = 0.5 * (zn + zn.transpose());
        zs += ad * dir.dzs;
    }
    return finalize(SolveStatus::max_iter, config.max_iter, true);
}

void write_trace_csv(const SdpSolution& sol, std::ostream& out) {
    out << "iter,primal_obj,dual_obj,gap,feas_residual\n";
    out.precision(12);
    for (const auto& row : sol.trace)
        out << row.iter << "," << row.primal_obj << "," << row.dual_obj << "," << row.gap << ","
            << row.feas_residual << "\n";
}

}  // namespace sdmimo
