#pragma once

// Combinatorics of the degree-6 triangulation of the plane. A vertex (m, n)
// stands for the point m + n*omega with omega = -1/2 + (sqrt(3)/2) i.

#include <algorithm>
#include <array>
#include <compare>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "hexrigid/error.hpp"

namespace hexrigid {

struct Vertex {
    int m{0};
    int n{0};

    friend constexpr auto operator<=>(const Vertex&, const Vertex&) = default;

    constexpr Vertex operator+(Vertex o) const { return {m + o.m, n + o.n}; }
    constexpr Vertex operator-(Vertex o) const { return {m - o.m, n - o.n}; }
    constexpr Vertex operator-() const { return {-m, -n}; }
    constexpr Vertex operator*(int s) const { return {m * s, n * s}; }

    [[nodiscard]] std::string str() const
    {
        return "(" + std::to_string(m) + "," + std::to_string(n) + ")";
    }
};

struct VertexHash {
    std::size_t operator()(const Vertex& v) const noexcept
    {
        auto h = static_cast<std::size_t>(static_cast<unsigned>(v.m));
        return h * 0x9E3779B97F4A7C15ULL ^ static_cast<unsigned>(v.n);
    }
};

/// Unit displacements in counter-clockwise order: 1, 1+w, w, -1, -1-w, -w.
inline constexpr std::array<Vertex, 6> kDirections{
    Vertex{1, 0}, Vertex{1, 1}, Vertex{0, 1}, Vertex{-1, 0}, Vertex{-1, -1}, Vertex{0, -1}};

/// Slot of a unit displacement in kDirections, or nullopt.
inline std::optional<int> direction_slot(Vertex e)
{
    for (int s = 0; s < 6; ++s) {
        if (kDirections[s] == e) return s;
    }
    return std::nullopt;
}

inline std::array<Vertex, 6> neighbors(Vertex v)
{
    std::array<Vertex, 6> out{};
    for (int s = 0; s < 6; ++s) out[s] = v + kDirections[s];
    return out;
}

inline bool adjacent(Vertex a, Vertex b) { return direction_slot(b - a).has_value(); }

/// Shortest edge-path length; closed form for the six generators above.
inline int graph_distance(Vertex u, Vertex v)
{
    const int dm = v.m - u.m;
    const int dn = v.n - u.n;
    if (static_cast<long long>(dm) * dn < 0) return std::abs(dm) + std::abs(dn);
    return std::max(std::abs(dm), std::abs(dn));
}

/// Lattice point in the Euclidean plane for the regular unit embedding.
struct Point2 {
    double x{0.0};
    double y{0.0};
};

inline Point2 regular_embedding(Vertex v)
{
    constexpr double kHalfSqrt3 = 0.86602540378443864676;
    return {v.m - 0.5 * v.n, kHalfSqrt3 * v.n};
}

enum class FaceKind { Up, Down };

/// Up = {p, p+1, p+1+w}; Down = {p, p+1+w, p+w}. Both listed counter-clockwise.
struct Face {
    FaceKind kind{FaceKind::Up};
    Vertex anchor{};

    friend constexpr auto operator<=>(const Face&, const Face&) = default;

    [[nodiscard]] std::array<Vertex, 3> vertices() const
    {
        if (kind == FaceKind::Up) return {anchor, anchor + Vertex{1, 0}, anchor + Vertex{1, 1}};
        return {anchor, anchor + Vertex{1, 1}, anchor + Vertex{0, 1}};
    }

    [[nodiscard]] bool contains(Vertex v) const
    {
        auto vs = vertices();
        return std::find(vs.begin(), vs.end(), v) != vs.end();
    }

    [[nodiscard]] std::string str() const
    {
        return std::string(kind == FaceKind::Up ? "Up" : "Down") + anchor.str();
    }
};

struct FaceHash {
    std::size_t operator()(const Face& f) const noexcept
    {
        return VertexHash{}(f.anchor) * 2 + (f.kind == FaceKind::Up ? 0 : 1);
    }
};

/// The face spanned by three pairwise-adjacent vertices (any order).
inline Face face_of(Vertex a, Vertex b, Vertex c)
{
    const std::array<Vertex, 3> in{a, b, c};
    for (Vertex p : in) {
        for (FaceKind k : {FaceKind::Up, FaceKind::Down}) {
            Face f{k, p};
            auto vs = f.vertices();
            if (std::is_permutation(vs.begin(), vs.end(), in.begin())) return f;
        }
    }
    throw Error(ErrorKind::invalid_argument,
                "vertices " + a.str() + b.str() + c.str() + " do not span a face");
}

/// Face (v, v+e_s, v+e_{s+1}) of the star of v, s in [0, 6).
inline Face star_face(Vertex v, int s)
{
    return face_of(v, v + kDirections[s % 6], v + kDirections[(s + 1) % 6]);
}

/// Vertices at graph distance <= radius from center.
class Ball
{
public:
    Ball(Vertex center, int radius) : center_{center}, radius_{radius}
    {
        if (radius < 0) {
            throw Error(ErrorKind::invalid_argument,
                        "ball radius must be non-negative, got " + std::to_string(radius));
        }
        vertices_.reserve(static_cast<std::size_t>(1 + 3 * radius * (radius + 1)));
        for (int dm = -radius; dm <= radius; ++dm) {
            for (int dn = -radius; dn <= radius; ++dn) {
                Vertex v = center + Vertex{dm, dn};
                if (graph_distance(center, v) <= radius) vertices_.push_back(v);
            }
        }
        std::sort(vertices_.begin(), vertices_.end());
        index_.reserve(vertices_.size());
        for (std::size_t k = 0; k < vertices_.size(); ++k) {
            index_.emplace(vertices_[k], k);
            if (graph_distance(center, vertices_[k]) < radius) interior_.push_back(vertices_[k]);
        }
    }

    [[nodiscard]] Vertex center() const noexcept { return center_; }
    [[nodiscard]] int radius() const noexcept { return radius_; }
    // rvalue overloads copy, so `for (v : Ball(c, r).vertices())` is safe
    [[nodiscard]] const std::vector<Vertex>& vertices() const& noexcept { return vertices_; }
    [[nodiscard]] std::vector<Vertex> vertices() const&& { return vertices_; }
    /// Vertices at distance <= radius - 1 (full star inside the ball).
    [[nodiscard]] const std::vector<Vertex>& interior() const& noexcept { return interior_; }
    [[nodiscard]] std::vector<Vertex> interior() const&& { return interior_; }
    [[nodiscard]] std::size_t size() const noexcept { return vertices_.size(); }

    [[nodiscard]] bool contains(Vertex v) const { return graph_distance(center_, v) <= radius_; }
    [[nodiscard]] bool is_interior(Vertex v) const { return graph_distance(center_, v) < radius_; }

    [[nodiscard]] std::optional<std::size_t> index_of(Vertex v) const
    {
        auto it = index_.find(v);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    [[nodiscard]] bool contains_ball(Vertex c, int r) const
    {
        return graph_distance(center_, c) + r <= radius_;
    }

private:
    Vertex center_;
    int radius_;
    std::vector<Vertex> vertices_;
    std::vector<Vertex> interior_;
    std::unordered_map<Vertex, std::size_t, VertexHash> index_;
};

inline Ball ball(Vertex center, int radius) { return Ball(center, radius); }

/// Every face with all three vertices in the ball, each listed once, sorted.
inline std::vector<Face> faces_in_ball(const Ball& b)
{
    std::vector<Face> out;
    for (Vertex p : b.vertices()) {
        for (FaceKind k : {FaceKind::Up, FaceKind::Down}) {
            Face f{k, p};
            auto vs = f.vertices();
            if (b.contains(vs[1]) && b.contains(vs[2])) out.push_back(f);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace hexrigid
