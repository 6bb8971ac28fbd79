#pragma once

// Shared generators for the test suites. Every generator is driven by an
// explicit seed so failures reproduce.

#include <algorithm>
#include <cmath>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "hexrigid/hexrigid.hpp"

namespace fixtures {

using namespace hexrigid;

/// Triangle with l_i = li and every angle <= bound, by rejection.
inline Triangle random_acute(std::mt19937_64& rng, double bound, double li = 1.0)
{
    std::uniform_real_distribution<double> u(0.45, 1.9);
    for (;;) {
        const Triangle t{li, u(rng) * li, u(rng) * li};
        if (t.valid() && angles(t).max() <= bound) return t;
    }
}

/// Patch on B(0,R) with w uniform in [-amp, amp].
inline ConformalPatch random_patch(std::uint64_t seed, int R, double amp)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    auto dom = make_domain({0, 0}, R);
    std::vector<double> w(dom->ball.size());
    for (double& x : w) x = u(rng);
    return {dom, std::move(w)};
}

/// Flat patch from the curvature solver: random boundary data, zero curvature.
inline ConformalPatch solver_flat_patch(std::uint64_t seed, int R, double amp)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-amp, amp);
    YamabeProblem prob;
    prob.radius = R;
    const Ball b({0, 0}, R);
    for (Vertex v : b.vertices()) {
        if (b.is_interior(v)) {
            prob.target_K[v] = 0.0;
        } else {
            prob.boundary_w[v] = u(rng);
        }
    }
    return solve(prob, 1e-13, 50).final_w;
}

/// Quasi-harmonic weights: factor m on each of the six neighbors plus a random
/// Dirichlet share of the remaining 1 - 6m.
inline std::array<double, 6> random_weights(std::mt19937_64& rng, double m)
{
    std::exponential_distribution<double> e(1.0);
    std::array<double, 6> g{};
    double s = 0.0;
    for (double& x : g) {
        x = e(rng);
        s += x;
    }
    for (double& x : g) x = m + (1.0 - 6.0 * m) * x / s;
    return g;
}

/// Function on B(0,R) that is quasi-harmonic with factor m at every interior
/// vertex, given boundary values in [lo, hi].
inline VertexMap quasi_harmonic(std::uint64_t seed, int R, double m, double lo = 0.0, double hi = 1.0)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(lo, hi);
    const Ball b({0, 0}, R);
    const auto& vs = b.vertices();
    const auto n = static_cast<Eigen::Index>(vs.size());
    std::vector<Eigen::Triplet<double>> trips;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t r = 0; r < vs.size(); ++r) {
        const auto row = static_cast<int>(r);
        trips.emplace_back(row, row, 1.0);
        if (!b.is_interior(vs[r])) {
            rhs[row] = u(rng);
            continue;
        }
        const auto mu = random_weights(rng, m);
        for (int s = 0; s < 6; ++s) {
            const auto col = static_cast<int>(*b.index_of(vs[r] + kDirections[s]));
            trips.emplace_back(row, col, -mu[s]);
        }
    }
    Eigen::SparseMatrix<double> A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
    const Eigen::VectorXd x = lu.solve(rhs);
    VertexMap f;
    for (std::size_t r = 0; r < vs.size(); ++r) f[vs[r]] = x[static_cast<Eigen::Index>(r)];
    return f;
}

inline VertexMap affine(const VertexMap& f, double scale, double shift)
{
    VertexMap g;
    for (const auto& [v, x] : f) g[v] = scale * x + shift;
    return g;
}

}  // namespace fixtures
