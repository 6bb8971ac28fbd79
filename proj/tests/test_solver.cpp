#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hexrigid/solver.hpp"
#include "support/fixtures.hpp"

using namespace hexrigid;

namespace {

YamabeProblem flat_problem(int R, const std::function<double(Vertex)>& boundary)
{
    YamabeProblem prob;
    prob.radius = R;
    const Ball b({0, 0}, R);
    for (Vertex v : b.vertices()) {
        if (b.is_interior(v)) {
            prob.target_K[v] = 0.0;
        } else {
            prob.boundary_w[v] = boundary(v);
        }
    }
    return prob;
}

Eigen::MatrixXd finite_difference_jacobian(const ConformalPatch& p, double h)
{
    const auto& interior = p.ball().interior();
    Eigen::MatrixXd J(static_cast<Eigen::Index>(interior.size()), static_cast<Eigen::Index>(p.ball().size()));
    for (std::size_t c = 0; c < p.ball().size(); ++c) {
        std::vector<double> wp = p.values();
        std::vector<double> wm = p.values();
        wp[c] += h;
        wm[c] -= h;
        const CurvatureReport kp = curvature(p.with_values(wp));
        const CurvatureReport km = curvature(p.with_values(wm));
        for (std::size_t r = 0; r < interior.size(); ++r) {
            J(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                (kp.K.at(interior[r]) - km.K.at(interior[r])) / (2 * h);
        }
    }
    return J;
}

}  // namespace

TEST(CurvatureJacobian, RowsSumToZero)
{
    for (std::uint64_t seed : {0u, 1u}) {
        const ConformalPatch p = seed == 0 ? linear_factor(0, 0, ball({0, 0}, 3)) : fixtures::random_patch(seed, 3, 0.2);
        const Eigen::MatrixXd J = curvature_jacobian(p).matrix;
        for (Eigen::Index r = 0; r < J.rows(); ++r) EXPECT_NEAR(J.row(r).sum(), 0.0, 1e-13);
    }
}

TEST(CurvatureJacobian, MatchesFiniteDifferences)
{
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const ConformalPatch p = fixtures::random_patch(seed, 3, 0.2);
        const Eigen::MatrixXd J = curvature_jacobian(p).matrix;
        const Eigen::MatrixXd F = finite_difference_jacobian(p, 1e-6);
        for (Eigen::Index r = 0; r < J.rows(); ++r) {
            for (Eigen::Index c = 0; c < J.cols(); ++c) {
                EXPECT_NEAR(J(r, c), F(r, c), 1e-5 * std::max(1.0, std::abs(F(r, c))));
            }
        }
    }
}

TEST(CurvatureJacobian, SparsityFollowsStars)
{
    const ConformalPatch p = fixtures::random_patch(5, 3, 0.2);
    const CurvatureJacobian J = curvature_jacobian(p);
    const auto& vs = p.ball().vertices();
    for (int k = 0; k < J.matrix.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(J.matrix, k); it; ++it) {
            const Vertex i = J.rows[static_cast<std::size_t>(it.row())];
            const Vertex j = vs[static_cast<std::size_t>(it.col())];
            EXPECT_LE(graph_distance(i, j), 1);
        }
    }
}

TEST(CurvatureJacobian, InteriorBlockIsSymmetric)
{
    const ConformalPatch p = fixtures::random_patch(8, 4, 0.2);
    const CurvatureJacobian J = curvature_jacobian(p);
    const Eigen::MatrixXd D = J.matrix;
    for (std::size_t r = 0; r < J.rows.size(); ++r) {
        for (std::size_t s = 0; s < J.rows.size(); ++s) {
            const auto cr = static_cast<Eigen::Index>(*p.ball().index_of(J.rows[r]));
            const auto cs = static_cast<Eigen::Index>(*p.ball().index_of(J.rows[s]));
            EXPECT_NEAR(D(static_cast<Eigen::Index>(r), cs), D(static_cast<Eigen::Index>(s), cr), 1e-9);
        }
    }
}

TEST(Solve, ConstantBoundaryGivesConstantInterior)
{
    const YamabeProblem prob = flat_problem(4, [](Vertex) { return 0.3; });
    const SolveTrace t = solve(prob);
    ASSERT_TRUE(t.converged);
    for (Vertex v : t.final_w.ball().interior()) EXPECT_NEAR(t.final_w.w(v), 0.3, 1e-8);
}

TEST(Solve, LinearBoundaryGivesLinearExtension)
{
    const YamabeProblem prob = flat_problem(6, [](Vertex v) { return 0.1 * v.m - 0.05 * v.n; });
    YamabeProblem perturbed = prob;
    perturbed.initial_interior_w = VertexMap{};
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-0.05, 0.05);
    for (const auto& [v, k] : prob.target_K) (*perturbed.initial_interior_w)[v] = u(rng);
    for (const YamabeProblem* pr : {&prob, static_cast<const YamabeProblem*>(&perturbed)}) {
        const SolveTrace t = solve(*pr);
        ASSERT_TRUE(t.converged);
        for (Vertex v : t.final_w.ball().interior()) EXPECT_NEAR(t.final_w.w(v), 0.1 * v.m - 0.05 * v.n, 1e-8);
    }
}

TEST(Solve, TraceRecordsEveryIteration)
{
    const SolveTrace t = solve(flat_problem(3, [](Vertex v) { return 0.05 * v.m; }), 1e-12);
    ASSERT_TRUE(t.converged);
    ASSERT_GE(t.iterations.size(), 2u);
    EXPECT_LE(t.iterations.back().residual_inf_norm, 1e-12);
    EXPECT_EQ(t.iterations.back().step_scale, 0.0);
    for (std::size_t k = 1; k < t.iterations.size(); ++k) {
        EXPECT_LT(t.iterations[k].residual_inf_norm, t.iterations[k - 1].residual_inf_norm);
    }
}

TEST(Solve, PrescribedCurvaturePair)
{
    YamabeProblem prob = flat_problem(4, [](Vertex) { return 0.0; });
    prob.target_K[{1, 0}] = 0.1;
    prob.target_K[{-1, 0}] = -0.1;
    const SolveTrace t = solve(prob);
    ASSERT_TRUE(t.converged);
    const CurvatureReport r = curvature(t.final_w);
    for (const auto& [v, k] : prob.target_K) EXPECT_NEAR(r.K.at(v), k, 1e-10);
}

TEST(Solve, MaxIterExceededIsNotConverged)
{
    const SolveTrace t = solve(flat_problem(3, [](Vertex v) { return 0.1 * v.m; }), 1e-10, 0);
    EXPECT_FALSE(t.converged);
    EXPECT_EQ(t.iterations.size(), 1u);
}

TEST(Solve, ConvergedSolutionsPassChecks)
{
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const ConformalPatch p = fixtures::solver_flat_patch(seed, 4, 0.2);
        EXPECT_LE(curvature(p).max_abs_K, 1e-10);
        EXPECT_TRUE(check_edge_ratio_bound(p).empty());
    }
}

TEST(Solve, ProblemValidation)
{
    YamabeProblem prob = flat_problem(2, [](Vertex) { return 0.0; });
    YamabeProblem missing = prob;
    missing.boundary_w.erase({2, 0});
    try {
        (void)solve(missing);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::incomplete_data);
    }
    YamabeProblem extra = prob;
    extra.boundary_w[{0, 0}] = 1.0;
    try {
        (void)solve(extra);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
    }
}

TEST(Solve, InvalidInitialTriangles)
{
    YamabeProblem prob = flat_problem(2, [](Vertex v) { return v.m == 2 ? 3.0 : 0.0; });
    try {
        (void)solve(prob);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::invalid_triangle);
    }
}

TEST(Solve, InfeasibleTargetGetsStuckOrStops)
{
    YamabeProblem prob = flat_problem(2, [](Vertex) { return 0.0; });
    for (auto& [v, k] : prob.target_K) k = 3.0;
    try {
        const SolveTrace t = solve(prob, 1e-10, 30);
        EXPECT_FALSE(t.converged);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::solver_stuck);
    }
}
