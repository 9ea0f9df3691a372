#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <sstream>

#include "oracles.hpp"
#include "sdmimo/relax.hpp"

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

}  // namespace

TEST_CASE("bqp of the scalar binary instance") {
    Constellation c = gray_pam(2);
    ExpansionStructure e = real_expansion(c, 1);
    Mat h(1, 1);
    h << 1.0;
    Vec y(1);
    y << 0.9;
    BqpProblem bqp = build_bqp(h, y, e);
    CHECK(bqp.q(0, 0) == doctest::Approx(1.0));
    CHECK(bqp.q(0, 1) == doctest::Approx(-1.0));
    CHECK(bqp.q(1, 0) == doctest::Approx(-1.0));
    CHECK(bqp.q(1, 1) == doctest::Approx(1.0));
    CHECK(bqp.c[0] == doctest::Approx(0.9));
    CHECK(bqp.c[1] == doctest::Approx(-0.9));
    VecI u1(2), u2(2);
    u1 << 0, 1;
    u2 << 1, 0;
    CHECK(bqp.objective(u1) == doctest::Approx(-0.8));
    CHECK(bqp.objective(u2) == doctest::Approx(2.8));
}

TEST_CASE("zero received vector gives zero linear term") {
    Constellation c = gray_pam(4);
    ExpansionStructure e = real_expansion(c, 2);
    Rng rng(1);
    Mat h = oracles::random_matrix(rng, 2, 2);
    BqpProblem bqp = build_bqp(h, Vec::Zero(2), e);
    CHECK(bqp.c.norm() == doctest::Approx(0.0));
}

TEST_CASE("bqp objective equals the distance minus the received energy") {
    Rng rng(2);
    Constellation c = gray_pam(2);
    ExpansionStructure e = real_expansion(c, 2);
    for (int rep = 0; rep < 10; ++rep) {
        Mat h = oracles::random_matrix(rng, 2, 2);
        Vec y = oracles::random_matrix(rng, 2, 1);
        BqpProblem bqp = build_bqp(h, y, e);
        for (const auto& u : oracles::all_selectors(e.layout)) {
            double lhs = bqp.objective(u) + y.squaredNorm();
            double rhs = oracles::distance2(h, y, e, u);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("lifting identity trace(L Y_u) = objective") {
    Rng rng(3);
    Constellation c = gray_pam(4);
    ExpansionStructure e = real_expansion(c, 2);
    Mat h = oracles::random_matrix(rng, 2, 2);
    Vec y = oracles::random_matrix(rng, 2, 1);
    BqpProblem bqp = build_bqp(h, y, e);
    for (const auto& u : oracles::all_selectors(e.layout)) {
        Mat yu = lift_selector(u);
        double tr = (bqp.lq.array() * yu.array()).sum();
        CHECK(tr == doctest::Approx(bqp.objective(u)).epsilon(1e-10));
    }
}

TEST_CASE("projection pieces for K=2") {
    Mat v = projection_v(2);
    CHECK(v(0, 0) == doctest::Approx(1.0));
    CHECK(v(1, 0) == doctest::Approx(-1.0));
    Mat f = projection_f(2, 1);
    CHECK(f(0, 0) == doctest::Approx(0.0));
    CHECK(f(1, 0) == doctest::Approx(1.0));
}

TEST_CASE("projection column sums for K=3, N=2") {
    Mat f = projection_f(3, 2);
    Vec colsum = f.colwise().sum();
    CHECK((colsum - Vec::Ones(2)).norm() == doctest::Approx(0.0));
    ProjectionBasis basis = build_projection(3, 2);
    CHECK((basis.t * basis.v_hat).norm() == doctest::Approx(0.0));
    Eigen::FullPivLU<Mat> lu(basis.v_hat);
    CHECK(lu.rank() == basis.m);
}

TEST_CASE("reconstruct_column_stochastic") {
    Mat z0 = Mat::Zero(1, 1);
    Mat x0 = reconstruct_column_stochastic(z0, 2, 1);
    CHECK((x0 - projection_f(2, 1)).norm() == doctest::Approx(0.0));

    Mat z1(1, 1);
    z1 << 1.0;
    Mat x1 = reconstruct_column_stochastic(z1, 2, 1);
    CHECK(x1(0, 0) == doctest::Approx(1.0));
    CHECK(x1(1, 0) == doctest::Approx(0.0));

    Rng rng(4);
    for (int rep = 0; rep < 20; ++rep) {
        int k = 2 + rng.uniform_int(3);
        int n = 1 + rng.uniform_int(3);
        Mat z = Mat::Zero(k - 1, n);
        for (int col = 0; col < n; ++col) {
            if (rng.uniform() < 0.7) z(rng.uniform_int(k - 1), col) = 1.0;
        }
        Mat x = reconstruct_column_stochastic(z, k, n);
        for (int col = 0; col < n; ++col) CHECK(x.col(col).sum() == doctest::Approx(1.0));
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < n; ++j)
                CHECK((x(i, j) == doctest::Approx(0.0) || x(i, j) == doctest::Approx(1.0)));
        CHECK((x.topRows(k - 1) - z).norm() == doctest::Approx(0.0));
    }
}

TEST_CASE("gangster index enumeration") {
    GangsterIndex g31 = gangster_indices(3, 1);
    std::vector<std::pair<int, int>> expect31{{1, 2}, {1, 3}, {2, 3}};
    CHECK(g31.j == expect31);

    GangsterIndex g22 = gangster_indices(2, 2);
    std::vector<std::pair<int, int>> expect22{{1, 2}, {3, 4}};
    CHECK(g22.j == expect22);
    CHECK(g22.j_bar.size() == 3);
    CHECK(g22.j_bar.front() == std::pair<int, int>{0, 0});
}

TEST_CASE("gangster of lifted feasible points vanishes") {
    for (int n : {1, 2, 3}) {
        BlockLayout layout = BlockLayout::uniform(2, n);
        GangsterIndex g = gangster_indices(layout);
        for (const auto& u : oracles::all_selectors(layout)) {
            Mat yu = lift_selector(u);
            CHECK(gangster_apply(yu, g.j).norm() == doctest::Approx(0.0));
        }
    }
}

TEST_CASE("barycenter matches the feasible-point average") {
    Mat y = barycenter(2, 1);
    Mat expect(3, 3);
    expect << 1.0, 0.5, 0.5, 0.5, 0.5, 0.0, 0.5, 0.0, 0.5;
    CHECK((y - expect).norm() == doctest::Approx(0.0));

    for (int k : {2, 3, 4}) {
        for (int n : {1, 2}) {
            BlockLayout layout = BlockLayout::uniform(k, n);
            Mat avg = Mat::Zero(layout.total() + 1, layout.total() + 1);
            auto sels = oracles::all_selectors(layout);
            for (const auto& u : sels) avg += lift_selector(u);
            avg /= static_cast<double>(sels.size());
            CHECK((barycenter(layout) - avg).norm() == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("barycenter eigenvalues and rank") {
    for (int k : {2, 3, 4}) {
        for (int n : {1, 2, 3}) {
            Mat y = barycenter(k, n);
            Eigen::SelfAdjointEigenSolver<Mat> es(y);
            Vec lam = es.eigenvalues();
            std::vector<double> sorted(lam.data(), lam.data() + lam.size());
            std::sort(sorted.begin(), sorted.end(), std::greater<double>());
            CHECK(sorted[0] == doctest::Approx((k + n) / static_cast<double>(k)).epsilon(1e-10));
            for (int i = 1; i <= n * (k - 1); ++i)
                CHECK(sorted[static_cast<size_t>(i)] == doctest::Approx(1.0 / k).epsilon(1e-10));
            for (size_t i = static_cast<size_t>(n * (k - 1)) + 1; i < sorted.size(); ++i)
                CHECK(std::abs(sorted[i]) < 1e-10);
        }
    }
}

TEST_CASE("interior point maps onto the barycenter") {
    Mat r21 = interior_point(2, 1);
    CHECK(r21(0, 0) == doctest::Approx(1.0));
    CHECK(r21(0, 1) == doctest::Approx(0.5));
    CHECK(r21(1, 1) == doctest::Approx(0.5));

    for (int k : {2, 4, 8}) {
        for (int n : {2, 4}) {
            BlockLayout layout = BlockLayout::uniform(k, n);
            Mat rhat = interior_point(layout);
            ProjectionBasis basis = build_projection(layout);
            CHECK((basis.lift(rhat) - barycenter(layout)).lpNorm<Eigen::Infinity>() < 1e-12);
            Eigen::SelfAdjointEigenSolver<Mat> es(rhat);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
        }
    }
}

TEST_CASE("paper interior-point formula equals the expectation form") {
    // R = [[1, e^T/K], [e/K, E/K^2 + (K I - E)/K^2 per block]]
    for (int k : {2, 3, 5}) {
        for (int n : {1, 3}) {
            int nred = n * (k - 1);
            Mat expect(nred + 1, nred + 1);
            expect(0, 0) = 1.0;
            expect.block(0, 1, 1, nred).setConstant(1.0 / k);
            expect.block(1, 0, nred, 1).setConstant(1.0 / k);
            Mat lower = Mat::Constant(nred, nred, 1.0 / (k * static_cast<double>(k)));
            for (int b = 0; b < n; ++b)
                lower.block(b * (k - 1), b * (k - 1), k - 1, k - 1) +=
                    (k * Mat::Identity(k - 1, k - 1) - Mat::Ones(k - 1, k - 1)) /
                    (k * static_cast<double>(k));
            expect.block(1, 1, nred, nred) = lower;
            CHECK((interior_point(k, n) - expect).norm() == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("null space of the barycenter is the row space of T") {
    BlockLayout layout = BlockLayout::uniform(3, 2);
    Mat y = barycenter(layout);
    ProjectionBasis basis = build_projection(layout);
    CHECK((basis.t * y).norm() == doctest::Approx(0.0).epsilon(1e-12));
    Eigen::FullPivLU<Mat> lu(y);
    CHECK(lu.rank() == basis.m);
    for (const auto& u : oracles::all_selectors(layout))
        CHECK((basis.t * lift_selector(u)).norm() == doctest::Approx(0.0));
}

TEST_CASE("truth points are feasible for tiers III and IV") {
    Rng rng(5);
    Constellation c = gray_pam(2);
    ExpansionStructure e = real_expansion(c, 2);
    Mat h = oracles::random_matrix(rng, 2, 2);
    Vec y = oracles::random_matrix(rng, 2, 1);
    BqpProblem bqp = build_bqp(h, y, e);
    SdpModel m4 = assemble_model(bqp, ModelTier::iv);
    for (const auto& u : oracles::all_selectors(e.layout)) {
        Vec p = m4.basis.reduced_point(u);
        Mat r = p * p.transpose();
        Mat lifted = m4.basis.lift(r);
        CHECK((lifted - lift_selector(u)).lpNorm<Eigen::Infinity>() < 1e-12);
        for (const auto& eq : m4.equalities) {
            double acc = 0.0;
            for (const auto& t : eq.terms) acc += t.w * lifted(t.i, t.j);
            CHECK(acc == doctest::Approx(eq.rhs).epsilon(1e-12));
        }
        for (auto [i, j] : m4.inequalities) CHECK(lifted(i, j) >= -1e-12);
    }
}

TEST_CASE("model shapes per tier") {
    Constellation c2 = gray_pam(2);
    ExpansionStructure e22 = real_expansion(c2, 2);
    BqpProblem bqp22 = build_bqp(Mat::Identity(2, 2), Vec::Zero(2), e22);
    SdpModel m3 = assemble_model(bqp22, ModelTier::iii);
    CHECK(m3.equalities.size() == 3);  // |J| = 2 plus (0,0)
    CHECK(m3.inequalities.empty());

    SdpModel m4zero = assemble_model(bqp22, ModelTier::iv, 0);
    CHECK(m4zero.equalities.size() == m3.equalities.size());
    CHECK(m4zero.inequalities.empty());

    Constellation c4 = gray_pam(4);
    ExpansionStructure e44 = real_expansion(c4, 4);
    BqpProblem bqp44 = build_bqp(Mat::Identity(4, 4), Vec::Zero(4), e44);
    SdpModel m4 = assemble_model(bqp44, ModelTier::iv);
    CHECK(m4.m == 13);
    CHECK(m4.objective.rows() == 13);
    CHECK(m4.objective.cols() == 13);
    CHECK(m4.equalities.size() == 4 * 6 + 1);
    CHECK((m4.objective - m4.objective.transpose()).norm() == doctest::Approx(0.0));

    SdpModel m2 = assemble_model(bqp44, ModelTier::ii);
    CHECK(m2.equalities.size() == static_cast<size_t>(bqp44.n() + 1));
}

TEST_CASE("budgeted inequality selection ranks most-violated first") {
    Constellation c = gray_pam(2);
    ExpansionStructure e = real_expansion(c, 2);
    BqpProblem bqp = build_bqp(Mat::Identity(2, 2), Vec::Zero(2), e);
    GangsterIndex g = gangster_indices(bqp.layout);
    Mat y_prior = Mat::Zero(5, 5);
    // make (2,4) the most negative entry, then (1,3)
    y_prior(2, 4) = y_prior(4, 2) = -0.5;
    y_prior(1, 3) = y_prior(3, 1) = -0.2;
    SdpModel m = assemble_model(bqp, ModelTier::iv, 2, &y_prior);
    REQUIRE(m.inequalities.size() == 2);
    CHECK(std::find(m.inequalities.begin(), m.inequalities.end(), std::pair<int, int>{2, 4}) !=
          m.inequalities.end());
    CHECK(std::find(m.inequalities.begin(), m.inequalities.end(), std::pair<int, int>{1, 3}) !=
          m.inequalities.end());
    CHECK(g.j_hat.size() == 4);
}

TEST_CASE("equality constraints are linearly independent in R space") {
    for (int k : {2, 3, 4}) {
        for (int n : {1, 2, 3}) {
            Constellation c = gray_pam(k == 3 ? 2 : k);  // alphabet only shapes the objective
            BlockLayout layout = BlockLayout::uniform(k, n);
            ExpansionStructure e;
            e.layout = layout;
            e.coeff = Mat::Random(n, layout.total());
            e.selection = Mat::Zero(n, layout.total());
            BqpProblem bqp;
            bqp.layout = layout;
            bqp.q = Mat::Identity(layout.total(), layout.total());
            bqp.c = Vec::Zero(layout.total());
            bqp.lq = Mat::Identity(layout.total() + 1, layout.total() + 1);
            for (ModelTier tier : {ModelTier::ii, ModelTier::iii}) {
                SdpModel m = assemble_model(bqp, tier);
                // stack vec(A_k) and check row rank
                const int mm = m.m;
                Mat stacked(static_cast<int>(m.equalities.size()), mm * mm);
                for (size_t cidx = 0; cidx < m.equalities.size(); ++cidx) {
                    Mat a = Mat::Zero(mm, mm);
                    for (const auto& t : m.equalities[cidx].terms) {
                        Vec vi = m.basis.v_hat.row(t.i).transpose();
                        Vec vj = m.basis.v_hat.row(t.j).transpose();
                        a += 0.5 * t.w * (vi * vj.transpose() + vj * vi.transpose());
                    }
                    stacked.row(static_cast<int>(cidx)) =
                        Eigen::Map<Vec>(a.data(), mm * mm).transpose();
                }
                Eigen::FullPivLU<Mat> lu(stacked);
                CHECK(lu.rank() == static_cast<int>(m.equalities.size()));
            }
        }
    }
}

TEST_CASE("model dump round trip") {
    Constellation c = gray_pam(4);
    ExpansionStructure e = real_expansion(c, 2);
    Rng rng(6);
    BqpProblem bqp = build_bqp(oracles::random_matrix(rng, 2, 2), oracles::random_matrix(rng, 2, 1), e);
    SdpModel m = assemble_model(bqp, ModelTier::iv, 5, nullptr);
    std::stringstream s;
    dump_model(m, s);
    SdpModel back = load_model(s);
    CHECK(back.m == m.m);
    CHECK(back.tier == m.tier);
    CHECK((back.objective - m.objective).norm() == doctest::Approx(0.0));
    REQUIRE(back.equalities.size() == m.equalities.size());
    for (size_t i = 0; i < m.equalities.size(); ++i) {
        CHECK(back.equalities[i].rhs == doctest::Approx(m.equalities[i].rhs));
        REQUIRE(back.equalities[i].terms.size() == m.equalities[i].terms.size());
    }
    CHECK(back.inequalities == m.inequalities);
}
