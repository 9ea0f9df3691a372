#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "oracles.hpp"
#include "sdmimo/solver.hpp"

using namespace sdmimo;

namespace {

ExpansionStructure real_expansion(const Constellation& c, int n_dims) {
    SystemInstance inst;
    inst.constellation = c;
    inst.qam_mode = true;
    inst.n_complex = 0;
    inst.channel = Mat::Identity(n_dims, n_dims);
    inst.received = Vec::Zero(n_dims);
    return instance_expansion(inst);
}

BqpProblem random_bqp(Rng& rng, int k, int n_dims, double noise = 1.0) {
    Constellation c = gray_pam(k);
    ExpansionStructure e = real_expansion(c, n_dims);
    Mat h = oracles::random_matrix(rng, n_dims, n_dims);
    VecI u_true = oracles::all_selectors(e.layout)[static_cast<size_t>(
        rng.uniform_int(static_cast<int>(std::pow(k, n_dims))))];
    Vec y = h * e.symbol_vector(u_true) + noise * oracles::random_matrix(rng, n_dims, 1);
    return build_bqp(h, y, e);
}

}  // namespace

TEST_CASE("zero objective is solved to a feasible point with zero value") {
    Constellation c = gray_pam(2);
    ExpansionStructure e = real_expansion(c, 2);
    BqpProblem bqp = build_bqp(Mat::Zero(2, 2), Vec::Zero(2), e);
    SdpModel model = assemble_model(bqp, ModelTier::iii);
    Mat warm = interior_point(bqp.layout);
    SdpSolution sol = solve(model, {}, &warm);
    CHECK(sol.status == SolveStatus::optimal);
    CHECK(std::abs(sol.lower_bound) < 1e-6);
    // equality constraints hold on the lifted matrix
    for (const auto& eq : model.equalities) {
        double acc = 0.0;
        for (const auto& t : eq.terms) acc += t.w * sol.y_lift(t.i, t.j);
        CHECK(acc == doctest::Approx(eq.rhs).epsilon(1e-6));
    }
}

TEST_CASE("scalar binary instance is tight for tier III") {
    Constellation c = gray_pam(2);
    ExpansionStructure e = real_expansion(c, 1);
    Mat h(1, 1);
    h << 1.0;
    Vec y(1);
    y << 0.9;
    BqpProblem bqp = build_bqp(h, y, e);
    SdpModel model = assemble_model(bqp, ModelTier::iii);
    Mat warm = interior_point(bqp.layout);
    SdpSolution sol = solve(model, {}, &warm);
    REQUIRE(sol.status == SolveStatus::optimal);
    CHECK(sol.lower_bound == doctest::Approx(-0.8).epsilon(1e-5));
    CHECK(sol.y_lift(0, 0) == doctest::Approx(1.0).epsilon(1e-6));
    CHECK(sol.y_lift(0, 1) == doctest::Approx(0.0).epsilon(1e-5));
    CHECK(sol.y_lift(0, 2) == doctest::Approx(1.0).epsilon(1e-5));
}

TEST_CASE("warm start yields finite residuals and shrinking gap") {
    Constellation c = gray_pam(2);
    ExpansionStructure e = real_expansion(c, 1);
    Mat h(1, 1);
    h << 1.0;
    Vec y(1);
    y << 0.9;
    BqpProblem bqp = build_bqp(h, y, e);
    SdpModel model = assemble_model(bqp, ModelTier::iii);
    Mat warm = interior_point(bqp.layout);
    SolverConfig cfg;
    cfg.keep_trace = true;
    SdpSolution sol = solve(model, cfg, &warm);
    REQUIRE(sol.trace.size() >= 6);
    for (const auto& row : sol.trace) {
        CHECK(std::isfinite(row.gap));
        CHECK(std::isfinite(row.feas_residual));
    }
    for (size_t i = 1; i < 6; ++i) CHECK(sol.trace[i].gap < sol.trace[i - 1].gap);
}

TEST_CASE("lifting the interior point recovers the barycenter") {
    BlockLayout layout = BlockLayout::uniform(3, 2);
    ProjectionBasis basis = build_projection(layout);
    Mat rhat = interior_point(layout);
    CHECK((basis.lift(rhat) - barycenter(layout)).lpNorm<Eigen::Infinity>() < 1e-12);

    // rank-one R from a selector lifts to Y_u exactly
    for (const auto& u : oracles::all_selectors(layout)) {
        Vec p = basis.reduced_point(u);
        Mat r = p * p.transpose();
        CHECK((basis.lift(r) - lift_selector(u)).lpNorm<Eigen::Infinity>() < 1e-12);
    }
}

TEST_CASE("solver feasibility residual matches an independent recomputation") {
    Rng rng(17);
    BqpProblem bqp = random_bqp(rng, 2, 3);
    SdpModel model = assemble_model(bqp, ModelTier::iii);
    Mat warm = interior_point(bqp.layout);
    SdpSolution sol = solve(model, {}, &warm);
    REQUIRE(sol.status == SolveStatus::optimal);
    double res = 0.0;
    for (const auto& eq : model.equalities) {
        double acc = 0.0;
        for (const auto& t : eq.terms) acc += t.w * sol.y_lift(t.i, t.j);
        res = std::max(res, std::abs(acc - eq.rhs));
    }
    CHECK(res < 1e-7);
}

TEST_CASE("lower bound property on random small instances") {
    Rng rng(23);
    int failures = 0;
    for (int rep = 0; rep < 50; ++rep) {
        int k = 2 + rng.uniform_int(3);  // 2..4
        BqpProblem bqp = random_bqp(rng, k, 2);
        SdpModel model = assemble_model(bqp, ModelTier::iii);
        Mat warm = interior_point(bqp.layout);
        SdpSolution sol = solve(model, {}, &warm);
        if (sol.status != SolveStatus::optimal) {
            ++failures;
            continue;
        }
        double ml = std::numeric_limits<double>::infinity();
        for (const auto& u : oracles::all_selectors(bqp.layout))
            ml = std::min(ml, bqp.objective(u));
        CHECK(sol.lower_bound <= ml + 1e-6);
    }
    CHECK(failures == 0);
}

TEST_CASE("tier ordering II <= III <= IV <= ML") {
    Rng rng(29);
    for (int rep = 0; rep < 20; ++rep) {
        int k = rep % 2 == 0 ? 2 : 4;
        BqpProblem bqp = random_bqp(rng, k, 2);
        Mat warm = interior_point(bqp.layout);
        SolverConfig cfg;
        cfg.tol_gap = 1e-9;
        cfg.tol_feas = 1e-10;
        cfg.max_iter = 200;
        SdpSolution s2 = solve(assemble_model(bqp, ModelTier::ii), cfg, &warm);
        SdpSolution s3 = solve(assemble_model(bqp, ModelTier::iii), cfg, &warm);
        SdpSolution s4 = solve(assemble_model(bqp, ModelTier::iv), cfg, &warm);
        REQUIRE(s2.status == SolveStatus::optimal);
        REQUIRE(s3.status == SolveStatus::optimal);
        REQUIRE(s4.status == SolveStatus::optimal);
        double ml = std::numeric_limits<double>::infinity();
        for (const auto& u : oracles::all_selectors(bqp.layout))
            ml = std::min(ml, bqp.objective(u));
        CHECK(s2.lower_bound <= s3.lower_bound + 1e-6);
        CHECK(s3.lower_bound <= s4.lower_bound + 1e-7 + 1e-7 * std::abs(s4.lower_bound));
        CHECK(s4.lower_bound <= ml + 1e-6);
    }
}

TEST_CASE("weak duality along the trace once residuals settle") {
    Rng rng(31);
    BqpProblem bqp = random_bqp(rng, 4, 2);
    SdpModel model = assemble_model(bqp, ModelTier::iii);
    Mat warm = interior_point(bqp.layout);
    SolverConfig cfg;
    cfg.keep_trace = true;
    SdpSolution sol = solve(model, cfg, &warm);
    REQUIRE(sol.status == SolveStatus::optimal);
    double scale = 1.0 + std::abs(sol.lower_bound);
    for (const auto& row : sol.trace) {
        if (row.feas_residual < 1e-6)
            CHECK(row.dual_obj <= row.primal_obj + 1e-6 * scale);
    }
}

TEST_CASE("identical inputs give identical iterate sequences") {
    Rng rng(37);
    BqpProblem bqp = random_bqp(rng, 4, 2);
    SdpModel model = assemble_model(bqp, ModelTier::iv);
    Mat warm = interior_point(bqp.layout);
    SolverConfig cfg;
    cfg.keep_trace = true;
    SdpSolution a = solve(model, cfg, &warm);
    SdpSolution b = solve(model, cfg, &warm);
    REQUIRE(a.trace.size() == b.trace.size());
    for (size_t i = 0; i < a.trace.size(); ++i) {
        CHECK(a.trace[i].primal_obj == b.trace[i].primal_obj);
        CHECK(a.trace[i].dual_obj == b.trace[i].dual_obj);
    }
    CHECK((a.r - b.r).norm() == 0.0);
}

TEST_CASE("tier IV inequalities hold at the solution") {
    Rng rng(41);
    BqpProblem bqp = random_bqp(rng, 4, 2);
    SdpModel model = assemble_model(bqp, ModelTier::iv);
    Mat warm = interior_point(bqp.layout);
    SdpSolution sol = solve(model, {}, &warm);
    REQUIRE(sol.status == SolveStatus::optimal);
    for (auto [i, j] : model.inequalities) CHECK(sol.y_lift(i, j) >= -1e-6);
    // with full budget, all lifted entries live in [0 - tol, 1 + tol]
    CHECK(sol.y_lift.minCoeff() >= -1e-6);
    CHECK(sol.y_lift.maxCoeff() <= 1.0 + 1e-6);
}

TEST_CASE("adding first-row entries to the sign set does not move the optimum") {
    // the kept inequality set omits first-row/diagonal entries as redundant;
    // enforcing them explicitly must not change the bound
    Rng rng(43);
    BqpProblem bqp = random_bqp(rng, 4, 2);
    Mat warm = interior_point(bqp.layout);
    SolverConfig cfg;
    cfg.tol_gap = 1e-9;
    cfg.tol_feas = 1e-10;
    cfg.max_iter = 200;
    SdpModel base = assemble_model(bqp, ModelTier::iv);
    SdpModel extended = base;
    for (int i = 1; i <= bqp.n(); ++i) extended.inequalities.emplace_back(0, i);
    SdpSolution a = solve(base, cfg, &warm);
    SdpSolution b = solve(extended, cfg, &warm);
    REQUIRE(a.status == SolveStatus::optimal);
    REQUIRE(b.status == SolveStatus::optimal);
    CHECK(a.lower_bound == doctest::Approx(b.lower_bound).epsilon(1e-6));
}

TEST_CASE("budgeted tier IV sits between III and full IV") {
    Rng rng(47);
    for (int rep = 0; rep < 5; ++rep) {
        BqpProblem bqp = random_bqp(rng, 4, 2);
        Mat warm = interior_point(bqp.layout);
        SolverConfig cfg;
        cfg.tol_gap = 1e-9;
        cfg.tol_feas = 1e-10;
        cfg.max_iter = 200;
        SdpSolution s3 = solve(assemble_model(bqp, ModelTier::iii), cfg, &warm);
        REQUIRE(s3.status == SolveStatus::optimal);
        SdpModel budget = assemble_model(bqp, ModelTier::iv, 8, &s3.y_lift);
        SdpSolution sb = solve(budget, cfg, &warm);
        SdpSolution s4 = solve(assemble_model(bqp, ModelTier::iv), cfg, &warm);
        REQUIRE(sb.status == SolveStatus::optimal);
        REQUIRE(s4.status == SolveStatus::optimal);
        double tol = 1e-6 * (1.0 + std::abs(s4.lower_bound));
        CHECK(s3.lower_bound <= sb.lower_bound + tol);
        CHECK(sb.lower_bound <= s4.lower_bound + tol);
    }
}
