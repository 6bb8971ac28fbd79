#pragma once

// Prescribed-curvature solver on a lattice ball with Dirichlet data on the
// boundary circle: damped Newton on K(w) - target over the interior factors.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "hexrigid/error.hpp"
#include "hexrigid/lattice.hpp"
#include "hexrigid/patch.hpp"
#include "hexrigid/trigeom.hpp"

namespace hexrigid {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// dK_i / dw_j; rows follow ball.interior(), columns follow ball.vertices().
struct CurvatureJacobian {
    SparseMatrix matrix;
    std::vector<Vertex> rows;
};

inline CurvatureJacobian curvature_jacobian(const ConformalPatch& p)
{
    const Ball& ball = p.ball();
    const auto& interior = ball.interior();
    std::unordered_map<Vertex, int, VertexHash> row_of;
    for (std::size_t r = 0; r < interior.size(); ++r) row_of.emplace(interior[r], static_cast<int>(r));

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(interior.size() * 7 * 6);
    for (const Face& f : p.faces()) {
        const Triangle t = p.triangle(f);
        if (!t.valid()) throw Error(ErrorKind::invalid_triangle, "face " + f.str());
        const auto d = angle_log_derivatives(t);
        const auto vs = f.vertices();
        for (int r = 0; r < 3; ++r) {
            auto row = row_of.find(vs[r]);
            if (row == row_of.end()) continue;
            for (int s = 0; s < 3; ++s) {
                // log l_x = w of the two vertices other than x, so w_s feeds every edge x != s.
                double dtheta = 0.0;
                for (int x = 0; x < 3; ++x) {
                    if (x != s) dtheta += d[r][x];
                }
                const auto col = static_cast<int>(*ball.index_of(vs[s]));
                triplets.emplace_back(row->second, col, -dtheta);
            }
        }
    }
    CurvatureJacobian out;
    out.rows = interior;
    out.matrix.resize(static_cast<Eigen::Index>(interior.size()), static_cast<Eigen::Index>(ball.size()));
    out.matrix.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

struct YamabeProblem {
    Vertex center{0, 0};
    int radius{1};
    VertexMap boundary_w;
    VertexMap target_K;
    std::optional<VertexMap> initial_interior_w;
};

struct SolveIteration {
    double residual_inf_norm{0.0};
    double step_scale{0.0};
};

struct SolveTrace {
    std::vector<SolveIteration> iterations;
    bool converged{false};
    ConformalPatch final_w;
};

namespace detail {

inline double inf_norm(const Eigen::VectorXd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

inline Eigen::VectorXd curvature_residual(const ConformalPatch& p, const Eigen::VectorXd& target)
{
    const CurvatureReport rep = curvature(p);
    const auto& interior = p.ball().interior();
    Eigen::VectorXd F(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t r = 0; r < interior.size(); ++r) {
        F[static_cast<Eigen::Index>(r)] = rep.K.at(interior[r]) - target[static_cast<Eigen::Index>(r)];
    }
    return F;
}

inline bool all_faces_valid(const ConformalPatch& base, const std::vector<double>& w)
{
    const auto& faces = base.faces();
    const Ball& b = base.ball();
    for (const Face& f : faces) {
        const auto vs = f.vertices();
        const double w0 = w[*b.index_of(vs[0])];
        const double w1 = w[*b.index_of(vs[1])];
        const double w2 = w[*b.index_of(vs[2])];
        const Triangle t{base.base_edge(vs[1], vs[2]) * std::exp(w1 + w2),
                         base.base_edge(vs[0], vs[2]) * std::exp(w0 + w2),
                         base.base_edge(vs[0], vs[1]) * std::exp(w0 + w1)};
        if (!t.valid()) return false;
    }
    return true;
}

}  // namespace detail

inline ConformalPatch initial_patch(const YamabeProblem& prob)
{
    auto dom = make_domain(prob.center, prob.radius);
    const Ball& b = dom->ball;
    std::size_t n_boundary = 0;
    double mean = 0.0;
    for (Vertex v : b.vertices()) {
        if (b.is_interior(v)) {
            if (!prob.target_K.count(v)) {
                throw Error(ErrorKind::incomplete_data, "target curvature missing at " + v.str());
            }
        } else {
            auto it = prob.boundary_w.find(v);
            if (it == prob.boundary_w.end()) {
                throw Error(ErrorKind::incomplete_data, "boundary value missing at " + v.str());
            }
            mean += it->second;
            ++n_boundary;
        }
    }
    for (const auto& [v, x] : prob.boundary_w) {
        if (!b.contains(v) || b.is_interior(v)) {
            throw Error(ErrorKind::invalid_argument, "boundary value given off the boundary at " + v.str());
        }
    }
    for (const auto& [v, x] : prob.target_K) {
        if (!b.is_interior(v)) {
            throw Error(ErrorKind::invalid_argument, "target curvature given off the interior at " + v.str());
        }
    }
    mean /= static_cast<double>(std::max<std::size_t>(n_boundary, 1));

    std::vector<double> w;
    w.reserve(b.size());
    for (Vertex v : b.vertices()) {
        if (!b.is_interior(v)) {
            w.push_back(prob.boundary_w.at(v));
        } else if (prob.initial_interior_w) {
            auto it = prob.initial_interior_w->find(v);
            w.push_back(it != prob.initial_interior_w->end() ? it->second : mean);
        } else {
            w.push_back(mean);
        }
    }
    return {dom, std::move(w)};
}

inline SolveTrace solve(const YamabeProblem& prob, double tol = 1e-10, int max_iter = 100)
{
    ConformalPatch patch = initial_patch(prob);
    const Ball& b = patch.ball();
    const auto& interior = b.interior();
    const auto n = static_cast<Eigen::Index>(interior.size());

    Eigen::VectorXd target(n);
    std::vector<int> interior_col(interior.size());
    std::vector<int> col_to_unknown(b.size(), -1);
    for (std::size_t r = 0; r < interior.size(); ++r) {
        target[static_cast<Eigen::Index>(r)] = prob.target_K.at(interior[r]);
        interior_col[r] = static_cast<int>(*b.index_of(interior[r]));
        col_to_unknown[static_cast<std::size_t>(interior_col[r])] = static_cast<int>(r);
    }

    SolveTrace trace{{}, false, patch};
    Eigen::VectorXd F = detail::curvature_residual(patch, target);
    double r = detail::inf_norm(F);
    constexpr int kMaxHalvings = 40;
    for (int iter = 0;; ++iter) {
        if (r <= tol) {
            trace.iterations.push_back({r, 0.0});
            trace.converged = true;
            break;
        }
        if (iter >= max_iter) {
            trace.iterations.push_back({r, 0.0});
            break;
        }
        const CurvatureJacobian J = curvature_jacobian(patch);
        std::vector<Eigen::Triplet<double>> trips;
        for (int k = 0; k < J.matrix.outerSize(); ++k) {
            for (SparseMatrix::InnerIterator it(J.matrix, k); it; ++it) {
                const int u = col_to_unknown[static_cast<std::size_t>(it.col())];
                if (u >= 0) trips.emplace_back(static_cast<int>(it.row()), u, it.value());
            }
        }
        SparseMatrix A(n, n);
        A.setFromTriplets(trips.begin(), trips.end());
        A.makeCompressed();
        Eigen::SparseLU<SparseMatrix> lu;
        lu.compute(A);
        if (lu.info() != Eigen::Success) {
            throw Error(ErrorKind::solver_stuck, "singular curvature Jacobian at iteration " + std::to_string(iter));
        }
        const Eigen::VectorXd delta = lu.solve(-F);

        double scale = 1.0;
        bool accepted = false;
        for (int h = 0; h <= kMaxHalvings; ++h, scale *= 0.5) {
            std::vector<double> w = patch.values();
            for (std::size_t u = 0; u < interior.size(); ++u) {
                w[static_cast<std::size_t>(interior_col[u])] += scale * delta[static_cast<Eigen::Index>(u)];
            }
            if (!detail::all_faces_valid(patch, w)) continue;
            ConformalPatch trial = patch.with_values(std::move(w));
            Eigen::VectorXd Ft = detail::curvature_residual(trial, target);
            const double rt = detail::inf_norm(Ft);
            if (rt < r) {
                trace.iterations.push_back({r, scale});
                patch = std::move(trial);
                F = std::move(Ft);
                r = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            throw Error(ErrorKind::solver_stuck, "no admissible step after " +
                                                     std::to_string(kMaxHalvings) +
                                                     " halvings, residual " + std::to_string(r));
        }
    }
    trace.final_w = patch;
    return trace;
}

}  // namespace hexrigid
