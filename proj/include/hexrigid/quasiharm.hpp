#pragma once

// Quasi-harmonic analysis: a vertex function is quasi-harmonic with factor m
// when each value is a convex combination of its six neighbors with every
// weight >= m. Weights are directed (no symmetry between i->j and j->i).

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "hexrigid/error.hpp"
#include "hexrigid/lattice.hpp"
#include "hexrigid/patch.hpp"
#include "hexrigid/trigeom.hpp"

namespace hexrigid {

/// Lower bound m(theta) / (6 M(theta)) on the weights of a difference quotient.
inline double harmonic_factor_bound(double theta)
{
    return harmonic_lower(theta) / (6.0 * harmonic_upper(theta));
}

struct QuasiHarmonicWeights {
    Vertex vertex;
    Vertex displacement;
    std::array<double, 6> mu{};   // counter-clockwise neighbor order
    std::array<double, 6> a{};
    std::array<double, 6> b{};
    double harmonic_factor_bound{0.0};
    double theta_bound{0.0};
    /// sum_j mu_j Delta_c w(i_j) - Delta_c w(i)
    double reconstruction_error{0.0};
};

namespace detail {

inline double star_curvature(const ConformalPatch& p, Vertex v)
{
    const auto th = star_angles(p, v);
    double alpha = 0.0;
    for (double t : th) alpha += t;
    return 2.0 * kPi - alpha;
}

}  // namespace detail

/// Directed weights expressing Delta_c w(i) as a convex combination of
/// Delta_c w over the neighbors of i. Needs flat, acute stars at i and i + c.
inline QuasiHarmonicWeights extract_weights(const ConformalPatch& p, Vertex c, Vertex i,
                                            double theta_bound, double flat_tol = 1e-9)
{
    const Ball& b = p.ball();
    const Vertex ic = i + c;
    if (!b.is_interior(i) || !b.is_interior(ic)) {
        throw Error(ErrorKind::invalid_argument,
                    "stars of " + i.str() + " and " + ic.str() + " must lie in the patch");
    }
    if (std::abs(detail::star_curvature(p, i)) > flat_tol ||
        std::abs(detail::star_curvature(p, ic)) > flat_tol) {
        throw Error(ErrorKind::not_flat, "curvature at " + i.str() + " or " + ic.str());
    }
    for (Vertex v : {i, ic}) {
        for (int s = 0; s < 6; ++s) {
            if (angles(p.triangle(star_face(v, s))).max() > theta_bound + 1e-12) {
                throw Error(ErrorKind::not_acute,
                            "face " + star_face(v, s).str() + " has an angle above the bound");
            }
        }
    }

    QuasiHarmonicWeights out;
    out.vertex = i;
    out.displacement = c;
    out.theta_bound = theta_bound;
    out.harmonic_factor_bound = harmonic_factor_bound(theta_bound);

    for (int s = 0; s < 6; ++s) {
        const Vertex nj = i + kDirections[s];
        const Vertex nk = i + kDirections[(s + 1) % 6];
        // Role i at the star center, j at i_s, k at i_{s+1}.
        const Triangle src{p.edge_length(nj, nk), p.edge_length(i, nk), p.edge_length(i, nj)};
        const double scale = src.li / p.edge_length(nj + c, nk + c);
        const Triangle dst{src.li, p.edge_length(ic, nk + c) * scale,
                           p.edge_length(ic, nj + c) * scale};
        const MeanValueCoeffs mv = mean_value_coeffs(src, dst, theta_bound);
        out.a[s] = mv.a;
        out.b[s] = mv.b;
    }
    double total = 0.0;
    for (int s = 0; s < 6; ++s) total += out.a[s] + out.b[s];
    for (int s = 0; s < 6; ++s) out.mu[s] = (out.a[s] + out.b[(s + 5) % 6]) / total;

    const double di = p.w(ic) - p.w(i);
    double combo = 0.0;
    for (int s = 0; s < 6; ++s) {
        const Vertex nj = i + kDirections[s];
        combo += out.mu[s] * (p.w(nj + c) - p.w(nj));
    }
    out.reconstruction_error = combo - di;
    return out;
}

struct PropagationReport {
    Vertex center;
    int R{0};
    double M{0.0};
    double epsilon{0.0};
    double factor{0.0};
    double min_over_ball{0.0};
    /// f(center) >= M - eps m^R and f <= M on the ball
    bool hypotheses_hold{false};
    /// min over the ball >= M - eps (up to 1e-12)
    bool holds{false};
    std::vector<Vertex> violations;
    /// vertices j with M - f(j) > (M - f(center)) / m^d(center, j)
    std::vector<Vertex> chain_violations;
};

inline PropagationReport verify_propagation(const VertexMap& f, double m, Vertex i, int R, double M,
                                            double epsilon)
{
    if (!(m > 0.0) || m > 1.0 / 6.0 + 1e-15) {
        throw Error(ErrorKind::invalid_argument, "harmonic factor must lie in (0, 1/6]");
    }
    if (R < 0) throw Error(ErrorKind::invalid_argument, "negative radius");
    const Ball b(i, R);
    auto value = [&](Vertex v) {
        auto it = f.find(v);
        if (it == f.end()) throw Error(ErrorKind::incomplete_data, "f missing at " + v.str());
        return it->second;
    };

    PropagationReport rep;
    rep.center = i;
    rep.R = R;
    rep.M = M;
    rep.epsilon = epsilon;
    rep.factor = m;
    rep.min_over_ball = std::numeric_limits<double>::infinity();
    const double fi = value(i);
    bool below = true;
    const double tol = 1e-12 * std::max(1.0, std::abs(M));
    for (Vertex v : b.vertices()) {
        const double fv = value(v);
        rep.min_over_ball = std::min(rep.min_over_ball, fv);
        if (fv > M + tol) below = false;
        if (fv < M - epsilon - 1e-12) rep.violations.push_back(v);
        const int d = graph_distance(i, v);
        const double amp = std::pow(m, -d);
        if (M - fv > (M - fi) * amp + tol * amp) rep.chain_violations.push_back(v);
    }
    rep.hypotheses_hold = below && fi >= M - epsilon * std::pow(m, R);
    rep.holds = rep.min_over_ball >= M - epsilon - 1e-12;
    return rep;
}

struct NearConstantBall {
    Vertex center;
    double M{0.0};
    double N{0.0};
    Vertex anchor;   // vertex whose nR-ball is near-maximal for f1
    int n{0};
    int k{0};
};

/// Thrown when the domain cannot contain the nested balls the search needs.
class DomainTooSmall : public Error
{
public:
    explicit DomainTooSmall(long long required)
        : Error(ErrorKind::domain_too_small,
                "search needs a ball of radius " + std::to_string(required) + " inside the domain"),
          required_{required}
    {
    }
    [[nodiscard]] long long required_radius() const noexcept { return required_; }

private:
    long long required_;
};

/// Ball B(center, R) on which f1 lies within eps below its domain maximum M and
/// f2 within eps below a level N, found by the nested-ball gap search.
inline NearConstantBall find_near_constant_ball(const VertexMap& f1, const VertexMap& f2, double m,
                                                int R, double epsilon, const Ball& domain)
{
    if (!(m > 0.0) || m > 1.0 / 6.0 + 1e-15) {
        throw Error(ErrorKind::invalid_argument, "harmonic factor must lie in (0, 1/6]");
    }
    if (R < 1 || !(epsilon > 0.0)) {
        throw Error(ErrorKind::invalid_argument, "need R >= 1 and epsilon > 0");
    }
    auto at = [](const VertexMap& f, Vertex v) {
        auto it = f.find(v);
        if (it == f.end()) throw Error(ErrorKind::incomplete_data, "function missing at " + v.str());
        return it->second;
    };
    double M = -std::numeric_limits<double>::infinity();
    double lo2 = std::numeric_limits<double>::infinity();
    double hi2 = -std::numeric_limits<double>::infinity();
    for (Vertex v : domain.vertices()) {
        M = std::max(M, at(f1, v));
        lo2 = std::min(lo2, at(f2, v));
        hi2 = std::max(hi2, at(f2, v));
    }
    // f2 centered at its mid-range has sup |f2| = (hi2 - lo2) / 2.
    const double gap = epsilon * std::pow(m, R);
    const double ratio = (hi2 - lo2) / gap;
    if (ratio > 1e9) throw DomainTooSmall(std::numeric_limits<long long>::max());
    const int n = static_cast<int>(std::floor(ratio)) + 1;
    const long long outer = static_cast<long long>(n) * R;
    if (outer > domain.radius()) throw DomainTooSmall(outer);

    std::optional<Vertex> anchor;
    double best = -std::numeric_limits<double>::infinity();
    for (Vertex v : domain.vertices()) {
        if (!domain.contains_ball(v, static_cast<int>(outer))) continue;
        const double fv = at(f1, v);
        if (fv > best) {
            best = fv;
            anchor = v;
        }
    }
    if (!anchor || best < M - epsilon * std::pow(m, static_cast<double>(outer))) {
        throw Error(ErrorKind::not_found,
                    "no vertex with a full " + std::to_string(outer) + "-ball is close enough to max f1");
    }

    auto max_on = [&](int radius) {
        Ball b(*anchor, radius);
        Vertex arg = *anchor;
        double mx = -std::numeric_limits<double>::infinity();
        for (Vertex v : b.vertices()) {
            const double fv = at(f2, v);
            if (fv > mx) {
                mx = fv;
                arg = v;
            }
        }
        return std::pair{mx, arg};
    };
    auto prev = max_on(0);
    for (int k = 1; k <= n; ++k) {
        auto cur = max_on(k * R);
        if (cur.first - prev.first <= gap) {
            return {prev.second, M, cur.first, *anchor, n, k};
        }
        prev = cur;
    }
    throw Error(ErrorKind::not_found, "no level gap found");
}

}  // namespace hexrigid
