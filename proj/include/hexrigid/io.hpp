#pragma once

// JSON file formats and SVG emission.
//
//   patch:    {"center":[m,n], "radius":R, "base_length":x, "w":[[m,n,value],...]}
//   layout:   {"positions":[[m,n,x,y],...], "holonomy_residual":h}
//   problem:  {"radius":R, "boundary_w":[[m,n,v],...], "target_K":[[m,n,v],...]}
//   values:   [[m,n,v],...] or an object holding such an array under "values" or "w"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "hexrigid/error.hpp"
#include "hexrigid/lattice.hpp"
#include "hexrigid/layout.hpp"
#include "hexrigid/patch.hpp"
#include "hexrigid/quasiharm.hpp"
#include "hexrigid/solver.hpp"

namespace hexrigid::io {

using json = nlohmann::json;

inline json read_json(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::data_error, "cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::data_error, path + ": " + e.what());
    }
}

inline void write_text(const std::string& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::data_error, "cannot write " + path);
    out << text;
    if (!out) throw Error(ErrorKind::data_error, "write failed for " + path);
}

inline void write_json(const std::string& path, const json& j) { write_text(path, j.dump(1) + "\n"); }

inline Vertex vertex_from(const json& j, const std::string& where)
{
    if (!j.is_array() || j.size() < 2 || !j[0].is_number_integer() || !j[1].is_number_integer()) {
        throw Error(ErrorKind::data_error, where + ": expected integer pair [m,n]");
    }
    return {j[0].get<int>(), j[1].get<int>()};
}

inline json vertex_values_to_json(const VertexMap& f)
{
    json arr = json::array();
    for (const auto& [v, x] : f) arr.push_back({v.m, v.n, x});
    return arr;
}

/// Parses [[m,n,v],...]; duplicates are rejected.
inline VertexMap vertex_values_from_json(const json& arr, const std::string& where)
{
    if (!arr.is_array()) throw Error(ErrorKind::data_error, where + ": expected an array");
    VertexMap out;
    for (const json& e : arr) {
        if (!e.is_array() || e.size() != 3 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            !e[2].is_number()) {
            throw Error(ErrorKind::data_error, where + ": entries must be [m,n,value]");
        }
        const Vertex v{e[0].get<int>(), e[1].get<int>()};
        if (!out.emplace(v, e[2].get<double>()).second) {
            throw Error(ErrorKind::data_error, where + ": duplicate vertex " + v.str());
        }
    }
    return out;
}

inline VertexMap load_values(const std::string& path)
{
    const json j = read_json(path);
    if (j.is_array()) return vertex_values_from_json(j, path);
    for (const char* key : {"values", "w"}) {
        if (j.is_object() && j.contains(key)) return vertex_values_from_json(j.at(key), path);
    }
    throw Error(ErrorKind::data_error, path + ": no vertex value array found");
}

// ---------------------------------------------------------------------------
// Patch
// ---------------------------------------------------------------------------

inline json patch_to_json(const ConformalPatch& p)
{
    json j;
    j["center"] = {p.ball().center().m, p.ball().center().n};
    j["radius"] = p.ball().radius();
    j["base_length"] = p.base_length();
    json w = json::array();
    const auto& vs = p.ball().vertices();
    for (std::size_t k = 0; k < vs.size(); ++k) w.push_back({vs[k].m, vs[k].n, p.values()[k]});
    j["w"] = std::move(w);
    return j;
}

inline ConformalPatch patch_from_json(const json& j, const std::string& where = "patch")
{
    if (!j.is_object()) throw Error(ErrorKind::data_error, where + ": expected an object");
    for (const char* key : {"center", "radius", "w"}) {
        if (!j.contains(key)) throw Error(ErrorKind::data_error, where + ": missing \"" + key + "\"");
    }
    const Vertex center = vertex_from(j.at("center"), where + ".center");
    if (!j.at("radius").is_number_integer()) {
        throw Error(ErrorKind::data_error, where + ".radius: expected an integer");
    }
    const int radius = j.at("radius").get<int>();
    if (radius < 0) throw Error(ErrorKind::data_error, where + ".radius: negative");
    double base = 1.0;
    if (j.contains("base_length")) {
        if (!j.at("base_length").is_number()) throw Error(ErrorKind::data_error, where + ".base_length");
        base = j.at("base_length").get<double>();
    }
    const VertexMap w = vertex_values_from_json(j.at("w"), where + ".w");
    auto dom = make_domain(center, radius);
    std::vector<double> values;
    values.reserve(dom->ball.size());
    for (Vertex v : dom->ball.vertices()) {
        auto it = w.find(v);
        if (it == w.end()) throw Error(ErrorKind::data_error, where + ": missing vertex " + v.str());
        values.push_back(it->second);
    }
    for (const auto& [v, x] : w) {
        if (!dom->ball.contains(v)) throw Error(ErrorKind::data_error, where + ": vertex " + v.str() + " outside ball");
    }
    try {
        return {dom, std::move(values), base};
    } catch (const Error& e) {
        throw Error(ErrorKind::data_error, where + ": " + e.what());
    }
}

inline ConformalPatch load_patch(const std::string& path) { return patch_from_json(read_json(path), path); }

inline void save_patch(const ConformalPatch& p, const std::string& path) { write_json(path, patch_to_json(p)); }

// ---------------------------------------------------------------------------
// Curvature, layout, overlaps, problems
// ---------------------------------------------------------------------------

inline json curvature_to_json(const CurvatureReport& r)
{
    json j;
    j["max_abs_K"] = r.max_abs_K;
    j["max_inner_angle"] = r.max_inner_angle;
    j["K"] = vertex_values_to_json(r.K);
    j["cone_angle"] = vertex_values_to_json(r.cone_angle);
    return j;
}

inline json layout_to_json(const LayoutResult& l)
{
    json pos = json::array();
    for (const auto& [v, z] : l.positions) pos.push_back({v.m, v.n, z.real(), z.imag()});
    json j;
    j["positions"] = std::move(pos);
    j["holonomy_residual"] = l.holonomy_residual;
    return j;
}

/// Faces are rebuilt from the vertex positions (every face whose three vertices are present).
inline LayoutResult layout_from_json(const json& j, const std::string& where = "layout")
{
    if (!j.is_object() || !j.contains("positions") || !j.at("positions").is_array()) {
        throw Error(ErrorKind::data_error, where + ": missing \"positions\" array");
    }
    LayoutResult l;
    for (const json& e : j.at("positions")) {
        if (!e.is_array() || e.size() != 4 || !e[0].is_number_integer() || !e[1].is_number_integer() ||
            !e[2].is_number() || !e[3].is_number()) {
            throw Error(ErrorKind::data_error, where + ": positions entries must be [m,n,x,y]");
        }
        const Vertex v{e[0].get<int>(), e[1].get<int>()};
        if (!l.positions.emplace(v, Complex{e[2].get<double>(), e[3].get<double>()}).second) {
            throw Error(ErrorKind::data_error, where + ": duplicate vertex " + v.str());
        }
    }
    if (j.contains("holonomy_residual")) l.holonomy_residual = j.at("holonomy_residual").get<double>();
    for (const auto& [v, z] : l.positions) {
        for (FaceKind k : {FaceKind::Up, FaceKind::Down}) {
            const Face f{k, v};
            const auto vs = f.vertices();
            auto p1 = l.positions.find(vs[1]);
            auto p2 = l.positions.find(vs[2]);
            if (p1 == l.positions.end() || p2 == l.positions.end()) continue;
            l.placed_faces.push_back({f, {z, p1->second, p2->second}});
        }
    }
    return l;
}

inline LayoutResult load_layout(const std::string& path) { return layout_from_json(read_json(path), path); }

inline json overlaps_to_json(const OverlapReport& r)
{
    json pairs = json::array();
    for (const auto& p : r.pairs) {
        json pj;
        pj["face_a"] = {p.face_a.kind == FaceKind::Up ? "Up" : "Down", p.face_a.anchor.m, p.face_a.anchor.n};
        pj["face_b"] = {p.face_b.kind == FaceKind::Up ? "Up" : "Down", p.face_b.anchor.m, p.face_b.anchor.n};
        pj["intersection_area"] = p.intersection_area;
        pairs.push_back(std::move(pj));
    }
    json j;
    j["area_threshold"] = r.area_threshold;
    j["pairs"] = std::move(pairs);
    return j;
}

inline YamabeProblem problem_from_json(const json& j, const std::string& where = "problem")
{
    if (!j.is_object() || !j.contains("radius") || !j.contains("boundary_w") || !j.contains("target_K")) {
        throw Error(ErrorKind::data_error, where + ": needs radius, boundary_w, target_K");
    }
    YamabeProblem p;
    if (j.contains("center")) p.center = vertex_from(j.at("center"), where + ".center");
    p.radius = j.at("radius").get<int>();
    p.boundary_w = vertex_values_from_json(j.at("boundary_w"), where + ".boundary_w");
    p.target_K = vertex_values_from_json(j.at("target_K"), where + ".target_K");
    return p;
}

inline json problem_to_json(const YamabeProblem& p)
{
    json j;
    j["radius"] = p.radius;
    if (p.center != Vertex{0, 0}) j["center"] = {p.center.m, p.center.n};
    j["boundary_w"] = vertex_values_to_json(p.boundary_w);
    j["target_K"] = vertex_values_to_json(p.target_K);
    return j;
}

inline json weights_to_json(const QuasiHarmonicWeights& q)
{
    json j;
    j["vertex"] = {q.vertex.m, q.vertex.n};
    j["c"] = {q.displacement.m, q.displacement.n};
    j["mu"] = q.mu;
    j["a"] = q.a;
    j["b"] = q.b;
    j["harmonic_factor_bound"] = q.harmonic_factor_bound;
    j["reconstruction_error"] = q.reconstruction_error;
    return j;
}

// ---------------------------------------------------------------------------
// SVG
// ---------------------------------------------------------------------------

inline constexpr const char* kSvgGenerator = "hexrigid 0.1";

/// One polygon per placed face; faces in an overlap pair are filled red.
inline std::string render_svg(const LayoutResult& layout, const OverlapReport& overlaps)
{
    if (layout.placed_faces.empty()) throw Error(ErrorKind::data_error, "layout has no faces");
    std::set<std::size_t> hot;
    for (const auto& p : overlaps.pairs) {
        hot.insert(p.first);
        hot.insert(p.second);
    }
    double x0 = std::numeric_limits<double>::infinity();
    double y0 = x0;
    double x1 = -x0;
    double y1 = -x0;
    for (const auto& pf : layout.placed_faces) {
        for (const Complex& z : pf.points) {
            x0 = std::min(x0, z.real());
            x1 = std::max(x1, z.real());
            y0 = std::min(y0, -z.imag());
            y1 = std::max(y1, -z.imag());
        }
    }
    const double pad = 0.05 * std::max(x1 - x0, y1 - y0);
    const double stroke = 0.002 * std::max(x1 - x0, y1 - y0);
    std::ostringstream os;
    os << std::setprecision(10);
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    os << "<!-- generator: " << kSvgGenerator << " -->\n";
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"" << x0 - pad << ' ' << y0 - pad << ' '
       << (x1 - x0) + 2 * pad << ' ' << (y1 - y0) + 2 * pad << "\">\n";
    for (std::size_t f = 0; f < layout.placed_faces.size(); ++f) {
        const auto& pts = layout.placed_faces[f].points;
        const bool overlap = hot.count(f) > 0;
        os << "<polygon class=\"" << (overlap ? "overlap" : "face") << "\" points=\"";
        for (int r = 0; r < 3; ++r) os << (r ? " " : "") << pts[r].real() << ',' << -pts[r].imag();
        os << "\" fill=\"" << (overlap ? "#e0443e" : "#dfe9f5") << "\" fill-opacity=\""
           << (overlap ? "0.6" : "1") << "\" stroke=\"#1d3557\" stroke-width=\"" << stroke << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

inline void save_svg(const LayoutResult& layout, const OverlapReport& overlaps, const std::string& path)
{
    write_text(path, render_svg(layout, overlaps));
}

}  // namespace hexrigid::io
