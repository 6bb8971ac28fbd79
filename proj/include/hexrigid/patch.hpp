#pragma once

// PL conformal factors on lattice balls. Edge lengths are always derived:
// l(ij) = base(ij) * exp(w_i + w_j), with base(ij) = base_length unless an
// explicit per-edge base length was assigned.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hexrigid/error.hpp"
#include "hexrigid/lattice.hpp"
#include "hexrigid/trigeom.hpp"

namespace hexrigid {

using VertexMap = std::map<Vertex, double>;

/// Undirected edge key with endpoints in lexicographic order.
struct Edge {
    Vertex a;
    Vertex b;

    Edge(Vertex u, Vertex v) : a{std::min(u, v)}, b{std::max(u, v)} {}

    friend bool operator==(const Edge&, const Edge&) = default;
};

struct EdgeHash {
    std::size_t operator()(const Edge& e) const noexcept
    {
        return VertexHash{}(e.a) * 31 + VertexHash{}(e.b);
    }
};

/// Ball together with its face list; shared between patches on the same ball.
struct PatchDomain {
    Ball ball;
    std::vector<Face> faces;
    std::unordered_map<Face, std::size_t, FaceHash> face_index;

    explicit PatchDomain(Ball b) : ball{std::move(b)}, faces{faces_in_ball(ball)}
    {
        face_index.reserve(faces.size());
        for (std::size_t f = 0; f < faces.size(); ++f) face_index.emplace(faces[f], f);
    }
};

inline std::shared_ptr<const PatchDomain> make_domain(Vertex center, int radius)
{
    return std::make_shared<const PatchDomain>(Ball(center, radius));
}

class ConformalPatch
{
public:
    using EdgeLengths = std::unordered_map<Edge, double, EdgeHash>;

    /// w is aligned with domain->ball.vertices(). Throws invalid-triangle on the first bad face.
    ConformalPatch(std::shared_ptr<const PatchDomain> domain, std::vector<double> w,
                   double base_length = 1.0, EdgeLengths base_overrides = {})
        : domain_{std::move(domain)},
          w_{std::move(w)},
          base_length_{base_length},
          base_overrides_{std::move(base_overrides)}
    {
        if (!(base_length_ > 0.0) || !std::isfinite(base_length_)) {
            throw Error(ErrorKind::invalid_argument, "base length must be positive");
        }
        if (w_.size() != domain_->ball.size()) {
            throw Error(ErrorKind::incomplete_data, "conformal factor size does not match ball");
        }
        if (auto bad = first_invalid_face()) {
            throw Error(ErrorKind::invalid_triangle,
                        "face " + bad->str() + " violates the triangle inequality");
        }
    }

    static ConformalPatch from_function(Vertex center, int radius,
                                        const std::function<double(Vertex)>& w,
                                        double base_length = 1.0)
    {
        auto dom = make_domain(center, radius);
        std::vector<double> values;
        values.reserve(dom->ball.size());
        for (Vertex v : dom->ball.vertices()) values.push_back(w(v));
        return {dom, std::move(values), base_length};
    }

    [[nodiscard]] const Ball& ball() const& noexcept { return domain_->ball; }
    [[nodiscard]] Ball ball() const&& { return domain_->ball; }
    [[nodiscard]] const std::vector<Face>& faces() const& noexcept { return domain_->faces; }
    [[nodiscard]] std::vector<Face> faces() const&& { return domain_->faces; }
    [[nodiscard]] const std::shared_ptr<const PatchDomain>& domain() const noexcept
    {
        return domain_;
    }
    [[nodiscard]] const std::vector<double>& values() const& noexcept { return w_; }
    [[nodiscard]] std::vector<double> values() const&& { return w_; }
    [[nodiscard]] double base_length() const noexcept { return base_length_; }
    [[nodiscard]] const EdgeLengths& base_overrides() const noexcept { return base_overrides_; }

    [[nodiscard]] double w(Vertex v) const
    {
        auto k = ball().index_of(v);
        if (!k) throw Error(ErrorKind::invalid_argument, "vertex " + v.str() + " outside patch");
        return w_[*k];
    }

    [[nodiscard]] std::optional<double> try_w(Vertex v) const
    {
        auto k = ball().index_of(v);
        if (!k) return std::nullopt;
        return w_[*k];
    }

    [[nodiscard]] double base_edge(Vertex i, Vertex j) const
    {
        if (!base_overrides_.empty()) {
            auto it = base_overrides_.find(Edge(i, j));
            if (it != base_overrides_.end()) return it->second;
        }
        return base_length_;
    }

    [[nodiscard]] double edge_length(Vertex i, Vertex j) const
    {
        if (!adjacent(i, j) || !ball().contains(i) || !ball().contains(j)) {
            throw Error(ErrorKind::invalid_edge, i.str() + "-" + j.str());
        }
        return base_edge(i, j) * std::exp(w(i) + w(j));
    }

    /// Face as a Triangle whose roles (i, j, k) are the face vertices in CCW order.
    [[nodiscard]] Triangle triangle(const Face& f) const
    {
        auto v = f.vertices();
        const double w0 = w(v[0]);
        const double w1 = w(v[1]);
        const double w2 = w(v[2]);
        return {base_edge(v[1], v[2]) * std::exp(w1 + w2), base_edge(v[0], v[2]) * std::exp(w0 + w2),
                base_edge(v[0], v[1]) * std::exp(w0 + w1)};
    }

    [[nodiscard]] std::optional<Face> first_invalid_face() const
    {
        for (const Face& f : faces()) {
            if (!triangle(f).valid()) return f;
        }
        return std::nullopt;
    }

    /// Same ball and base metric, different factor.
    [[nodiscard]] ConformalPatch with_values(std::vector<double> w) const
    {
        return {domain_, std::move(w), base_length_, base_overrides_};
    }

private:
    std::shared_ptr<const PatchDomain> domain_;
    std::vector<double> w_;
    double base_length_;
    EdgeLengths base_overrides_;
};

/// Angle of face f at vertex v.
inline double face_angle(const ConformalPatch& p, const Face& f, Vertex v)
{
    auto vs = f.vertices();
    const Angles a = angles(p.triangle(f));
    for (int r = 0; r < 3; ++r) {
        if (vs[r] == v) return a[r];
    }
    throw Error(ErrorKind::invalid_argument, "vertex " + v.str() + " not on face " + f.str());
}

/// theta^s at v for the star faces (v, v+e_s, v+e_{s+1}), s = 0..5.
inline std::array<double, 6> star_angles(const ConformalPatch& p, Vertex v)
{
    if (!p.ball().is_interior(v)) {
        throw Error(ErrorKind::invalid_argument, "vertex " + v.str() + " has no full star");
    }
    std::array<double, 6> out{};
    for (int s = 0; s < 6; ++s) out[s] = face_angle(p, star_face(v, s), v);
    return out;
}

struct CurvatureReport {
    VertexMap K;
    VertexMap cone_angle;
    double max_abs_K{0.0};
    double max_inner_angle{0.0};
};

inline CurvatureReport curvature(const ConformalPatch& p)
{
    const auto& faces = p.faces();
    std::vector<Angles> face_angles;
    face_angles.reserve(faces.size());
    CurvatureReport rep;
    for (const Face& f : faces) {
        const Triangle t = p.triangle(f);
        if (!t.valid()) throw Error(ErrorKind::invalid_triangle, "face " + f.str());
        face_angles.push_back(angles(t));
        rep.max_inner_angle = std::max(rep.max_inner_angle, face_angles.back().max());
    }
    const auto& index = p.domain()->face_index;
    for (Vertex v : p.ball().interior()) {
        double alpha = 0.0;
        for (int s = 0; s < 6; ++s) {
            const Face f = star_face(v, s);
            const std::size_t fi = index.at(f);
            auto vs = f.vertices();
            for (int r = 0; r < 3; ++r) {
                if (vs[r] == v) alpha += face_angles[fi][r];
            }
        }
        const double k = 2.0 * kPi - alpha;
        rep.cone_angle.emplace(v, alpha);
        rep.K.emplace(v, k);
        rep.max_abs_K = std::max(rep.max_abs_K, std::abs(k));
    }
    return rep;
}

/// (l_il * l_jk) / (l_ik * l_jl) across interior edge ij; k follows j counter-clockwise around i.
inline double length_cross_ratio(const ConformalPatch& p, Vertex i, Vertex j)
{
    auto slot = direction_slot(j - i);
    if (!slot) throw Error(ErrorKind::invalid_edge, i.str() + "-" + j.str() + " is not an edge");
    const Vertex k = i + kDirections[(*slot + 1) % 6];
    const Vertex l = i + kDirections[(*slot + 5) % 6];
    const Ball& b = p.ball();
    if (!b.contains(i) || !b.contains(j) || !b.contains(k) || !b.contains(l)) {
        throw Error(ErrorKind::invalid_edge, i.str() + "-" + j.str() + " is not interior");
    }
    return p.edge_length(i, l) * p.edge_length(j, k) / (p.edge_length(i, k) * p.edge_length(j, l));
}

/// w(m, n) = (m - c.m) M + (n - c.n) N on the ball, so w(center) = 0.
inline ConformalPatch linear_factor(double M, double N, const Ball& b, double base_length = 1.0)
{
    const Vertex c = b.center();
    auto dom = std::make_shared<const PatchDomain>(b);
    std::vector<double> w;
    w.reserve(b.size());
    for (Vertex v : b.vertices()) w.push_back((v.m - c.m) * M + (v.n - c.n) * N);
    try {
        return {dom, std::move(w), base_length};
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::invalid_triangle) throw;
        throw Error(ErrorKind::invalid_factor, std::string("linear factor yields ") + e.what());
    }
}

/// i -> w(i + c) - w(i) wherever both ends lie in the ball.
inline VertexMap difference(const ConformalPatch& p, Vertex c)
{
    VertexMap out;
    const auto& vs = p.ball().vertices();
    for (std::size_t k = 0; k < vs.size(); ++k) {
        if (auto shifted = p.try_w(vs[k] + c)) out.emplace(vs[k], *shifted - p.values()[k]);
    }
    return out;
}

struct EdgeRatioViolation {
    Vertex i;
    Vertex j;
    double ratio{0.0};   // exp(w(j) - w(i))
    double K{0.0};
};

/// Flat interior vertices (|K| <= tol) with some neighbor ratio exp(w(j) - w(i)) < 1/6.
inline std::vector<EdgeRatioViolation> check_edge_ratio_bound(const ConformalPatch& p,
                                                              double tol = 1e-9)
{
    const CurvatureReport rep = curvature(p);
    std::vector<EdgeRatioViolation> out;
    for (const auto& [v, k] : rep.K) {
        if (std::abs(k) > tol) continue;
        const double wi = p.w(v);
        for (Vertex j : neighbors(v)) {
            const double ratio = std::exp(p.w(j) - wi);
            if (ratio < 1.0 / 6.0) out.push_back({v, j, ratio, k});
        }
    }
    return out;
}

/// Number of similarity classes among faces, comparing angle triples in
/// canonical vertex order with tolerance tol.
inline std::size_t similarity_classes(const ConformalPatch& p, double tol = 1e-9)
{
    std::vector<Angles> reps;
    for (const Face& f : p.faces()) {
        const Angles a = angles(p.triangle(f));
        auto same = [&](const Angles& r) {
            return std::abs(r.i - a.i) <= tol && std::abs(r.j - a.j) <= tol &&
                   std::abs(r.k - a.k) <= tol;
        };
        if (std::none_of(reps.begin(), reps.end(), same)) reps.push_back(a);
    }
    return reps.size();
}

}  // namespace hexrigid
