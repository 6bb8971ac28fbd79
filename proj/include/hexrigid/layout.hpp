#pragma once

// Developing map of a conformal patch into the plane, overlap detection
// between placed faces, and the similarity maps along lattice directions of
// linear-factor layouts.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <deque>
#include <limits>
#include <map>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "hexrigid/error.hpp"
#include "hexrigid/lattice.hpp"
#include "hexrigid/patch.hpp"
#include "hexrigid/trigeom.hpp"

namespace hexrigid {

using Complex = std::complex<double>;

struct PlacedFace {
    Face face;
    std::array<Complex, 3> points;   // face vertices in canonical CCW order
};

struct LayoutResult {
    std::map<Vertex, Complex> positions;
    std::vector<PlacedFace> placed_faces;
    /// Max over interior vertices of the star-closing gap, in units of base length.
    double holonomy_residual{0.0};
};

inline double signed_area(const std::array<Complex, 3>& p)
{
    return 0.5 * ((p[1].real() - p[0].real()) * (p[2].imag() - p[0].imag()) -
                  (p[2].real() - p[0].real()) * (p[1].imag() - p[0].imag()));
}

/// Default base face: the up face anchored at the ball center.
inline Face default_base_face(const ConformalPatch& p) { return {FaceKind::Up, p.ball().center()}; }

inline LayoutResult develop(const ConformalPatch& p, const Face& base_face)
{
    LayoutResult out;
    const auto& faces = p.faces();
    const auto& index = p.domain()->face_index;
    if (faces.empty()) {
        out.positions.emplace(p.ball().center(), Complex{0.0, 0.0});
        return out;
    }
    auto base_it = index.find(base_face);
    if (base_it == index.end()) {
        throw Error(ErrorKind::invalid_argument, "base face " + base_face.str() + " not in patch");
    }

    std::vector<std::optional<std::array<Complex, 3>>> copies(faces.size());
    auto place_base = [&](std::size_t fi) {
        const Triangle t = p.triangle(faces[fi]);
        const Angles a = angles(t);
        copies[fi] = std::array<Complex, 3>{Complex{0.0, 0.0}, Complex{t.lk, 0.0},
                                            std::polar(t.lj, a.i)};
    };
    place_base(base_it->second);

    std::deque<std::size_t> queue{base_it->second};
    std::vector<std::size_t> order;
    order.reserve(faces.size());
    while (!queue.empty()) {
        const std::size_t fi = queue.front();
        queue.pop_front();
        order.push_back(fi);
        const auto vs = faces[fi].vertices();
        const auto& pts = *copies[fi];
        for (int e = 0; e < 3; ++e) {
            const Vertex a = vs[e];
            const Vertex b = vs[(e + 1) % 3];
            const int slot = *direction_slot(b - a);
            // Across directed edge a->b the other face has its apex at a + e_{slot-1}.
            const Vertex x = a + kDirections[(slot + 5) % 6];
            auto it = index.find(face_of(b, a, x));
            if (it == index.end() || copies[it->second]) continue;
            const std::size_t gi = it->second;
            const Face& g = faces[gi];
            const Complex pa = pts[e];
            const Complex pb = pts[(e + 1) % 3];
            const double angle_b = face_angle(p, g, b);
            const Complex dir = (pa - pb) / std::abs(pa - pb);
            const Complex px = pb + dir * std::polar(p.edge_length(b, x), angle_b);
            std::array<Complex, 3> gp{};
            const auto gv = g.vertices();
            for (int r = 0; r < 3; ++r) {
                gp[r] = gv[r] == a ? pa : (gv[r] == b ? pb : px);
            }
            copies[gi] = gp;
            queue.push_back(gi);
        }
    }

    out.placed_faces.reserve(order.size());
    for (std::size_t fi : order) {
        out.placed_faces.push_back({faces[fi], *copies[fi]});
        const auto vs = faces[fi].vertices();
        for (int r = 0; r < 3; ++r) out.positions.emplace(vs[r], (*copies[fi])[r]);
    }

    // Close each interior star by rotating the first spoke through the six angles.
    for (Vertex v : p.ball().interior()) {
        const Face f0 = star_face(v, 0);
        const auto& pts = *copies[index.at(f0)];
        const auto vs = f0.vertices();
        Complex center{};
        Complex spoke{};
        for (int r = 0; r < 3; ++r) {
            if (vs[r] == v) center = pts[r];
            if (vs[r] == v + kDirections[0]) spoke = pts[r];
        }
        Complex q = spoke;
        for (int s = 0; s < 6; ++s) {
            const Vertex from = v + kDirections[s];
            const Vertex to = v + kDirections[(s + 1) % 6];
            const double theta = face_angle(p, star_face(v, s), v);
            q = center + (q - center) * std::polar(p.edge_length(v, to) / p.edge_length(v, from), theta);
        }
        out.holonomy_residual =
            std::max(out.holonomy_residual, std::abs(q - spoke) / p.base_length());
    }
    return out;
}

inline LayoutResult develop(const ConformalPatch& p) { return develop(p, default_base_face(p)); }

// ---------------------------------------------------------------------------
// Overlap detection
// ---------------------------------------------------------------------------

/// Area of the intersection of two counter-clockwise triangles.
inline double triangle_intersection_area(const std::array<Complex, 3>& A,
                                         const std::array<Complex, 3>& B)
{
    std::vector<Complex> poly(A.begin(), A.end());
    std::vector<Complex> next;
    for (int e = 0; e < 3 && !poly.empty(); ++e) {
        const Complex c0 = B[e];
        const Complex c1 = B[(e + 1) % 3];
        auto side = [&](Complex z) {
            return (c1.real() - c0.real()) * (z.imag() - c0.imag()) -
                   (c1.imag() - c0.imag()) * (z.real() - c0.real());
        };
        next.clear();
        for (std::size_t k = 0; k < poly.size(); ++k) {
            const Complex s = poly[k];
            const Complex t = poly[(k + 1) % poly.size()];
            const double ds = side(s);
            const double dt = side(t);
            if (ds >= 0.0) next.push_back(s);
            if ((ds >= 0.0) != (dt >= 0.0)) next.push_back(s + (t - s) * (ds / (ds - dt)));
        }
        poly.swap(next);
    }
    if (poly.size() < 3) return 0.0;
    double area = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
        const Complex s = poly[k];
        const Complex t = poly[(k + 1) % poly.size()];
        area += s.real() * t.imag() - t.real() * s.imag();
    }
    return std::max(0.0, 0.5 * area);
}

struct OverlapPair {
    std::size_t first{0};    // index into placed_faces
    std::size_t second{0};
    Face face_a;
    Face face_b;
    double intersection_area{0.0};
};

struct OverlapReport {
    std::vector<OverlapPair> pairs;
    double area_threshold{0.0};
};

inline bool share_vertex(const Face& a, const Face& b)
{
    for (Vertex v : a.vertices()) {
        if (b.contains(v)) return true;
    }
    return false;
}

/// Positive-area intersections between placed faces that share no vertex.
inline OverlapReport find_overlap(const LayoutResult& layout, double relative_threshold = 1e-10)
{
    OverlapReport rep;
    const auto& faces = layout.placed_faces;
    if (faces.size() < 2) return rep;

    struct Box {
        double x0, y0, x1, y1;
    };
    std::vector<Box> boxes;
    boxes.reserve(faces.size());
    double min_area = std::numeric_limits<double>::infinity();
    double cell = 0.0;
    for (const auto& pf : faces) {
        Box bx{pf.points[0].real(), pf.points[0].imag(), pf.points[0].real(), pf.points[0].imag()};
        for (const Complex& z : pf.points) {
            bx.x0 = std::min(bx.x0, z.real());
            bx.y0 = std::min(bx.y0, z.imag());
            bx.x1 = std::max(bx.x1, z.real());
            bx.y1 = std::max(bx.y1, z.imag());
        }
        boxes.push_back(bx);
        cell = std::max({cell, bx.x1 - bx.x0, bx.y1 - bx.y0});
        min_area = std::min(min_area, std::abs(signed_area(pf.points)));
    }
    rep.area_threshold = relative_threshold * min_area;

    // Uniform grid with cell = largest face extent; every face touches at most 4 cells.
    std::unordered_map<long long, std::vector<std::size_t>> grid;
    auto key = [](long long cx, long long cy) { return cx * 0x100000007LL + cy; };
    auto cell_of = [&](double v) { return static_cast<long long>(std::floor(v / cell)); };
    for (std::size_t f = 0; f < faces.size(); ++f) {
        for (long long cx = cell_of(boxes[f].x0); cx <= cell_of(boxes[f].x1); ++cx) {
            for (long long cy = cell_of(boxes[f].y0); cy <= cell_of(boxes[f].y1); ++cy) {
                grid[key(cx, cy)].push_back(f);
            }
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (const auto& [k, members] : grid) {
        for (std::size_t u = 0; u < members.size(); ++u) {
            for (std::size_t v = u + 1; v < members.size(); ++v) {
                candidates.emplace_back(std::min(members[u], members[v]),
                                        std::max(members[u], members[v]));
            }
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (const auto& [a, b] : candidates) {
        const Box& A = boxes[a];
        const Box& B = boxes[b];
        if (A.x1 <= B.x0 || B.x1 <= A.x0 || A.y1 <= B.y0 || B.y1 <= A.y0) continue;
        if (share_vertex(faces[a].face, faces[b].face)) continue;
        const double area = triangle_intersection_area(faces[a].points, faces[b].points);
        if (area > rep.area_threshold) {
            rep.pairs.push_back({a, b, faces[a].face, faces[b].face, area});
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Similarities along lattice directions
// ---------------------------------------------------------------------------

/// z -> k z + b.
struct Similarity {
    Complex k{1.0, 0.0};
    Complex b{0.0, 0.0};
    std::optional<Complex> fixed_point;
    double contraction_norm{1.0};

    [[nodiscard]] Complex operator()(Complex z) const { return k * z + b; }
};

/// True when Delta_1 w and Delta_omega w are constant on the patch within tol.
inline bool is_linear_factor(const ConformalPatch& p, double tol = 1e-9)
{
    for (Vertex c : {Vertex{1, 0}, Vertex{0, 1}}) {
        const VertexMap d = difference(p, c);
        if (d.empty()) continue;
        const double ref = d.begin()->second;
        for (const auto& [v, x] : d) {
            if (std::abs(x - ref) > tol) return false;
        }
    }
    return true;
}

inline Similarity extract_similarity(const LayoutResult& layout, const ConformalPatch& p, Vertex i,
                                     Vertex e, int span)
{
    if (!direction_slot(e)) throw Error(ErrorKind::invalid_argument, e.str() + " is not a unit vector");
    if (span < 2) throw Error(ErrorKind::invalid_argument, "span must be at least 2");
    if (!is_linear_factor(p)) throw Error(ErrorKind::not_linear, "conformal factor is not linear");
    std::vector<Complex> g;
    for (int t = 0; t <= span; ++t) {
        auto it = layout.positions.find(i + e * t);
        if (it == layout.positions.end()) {
            throw Error(ErrorKind::invalid_argument, (i + e * t).str() + " not in layout");
        }
        g.push_back(it->second);
    }
    const Complex step0 = g[1] - g[0];
    const Complex step1 = g[2] - g[1];
    double scale = 1.0;
    for (const Complex& z : g) scale = std::max(scale, std::abs(z - g[0]));
    if (std::abs(step0) <= 1e-300 || std::abs(step1) <= 1e-300) {
        throw Error(ErrorKind::degenerate, "consecutive layout points coincide");
    }
    Similarity T;
    T.k = step1 / step0;
    T.b = g[1] - T.k * g[0];
    T.contraction_norm = std::abs(T.k);
    if (std::abs(T.k - 1.0) >= 1e-12) T.fixed_point = T.b / (1.0 - T.k);
    for (int t = 0; t < span; ++t) {
        if (std::abs(T(g[t]) - g[t + 1]) > 1e-8 * scale) {
            throw Error(ErrorKind::not_linear,
                        "similarity fails at step " + std::to_string(t) + " from " + i.str());
        }
    }
    return T;
}

struct OverlapWitness {
    int radius{0};
    OverlapPair pair;
};

/// Smallest R <= R_max at which the developed linear-factor ball overlaps itself.
inline std::optional<OverlapWitness> overlap_radius(double M, double N, int R_max)
{
    for (int R = 1; R <= R_max; ++R) {
        const ConformalPatch p = linear_factor(M, N, Ball({0, 0}, R));
        const OverlapReport rep = find_overlap(develop(p));
        if (!rep.pairs.empty()) return OverlapWitness{R, rep.pairs.front()};
    }
    return std::nullopt;
}

}  // namespace hexrigid
