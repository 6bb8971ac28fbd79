// Command-line front end. Exit codes: 0 success, 1 a verification check
// failed, 2 usage or data error.

#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hexrigid/hexrigid.hpp"
#include "hexrigid/io.hpp"

using namespace hexrigid;
namespace io = hexrigid::io;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kDataError = 2;

Vertex parse_vertex(const std::string& s)
{
    const auto comma = s.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::invalid_argument, "expected m,n but got '" + s + "'");
    try {
        std::size_t used = 0;
        const int m = std::stoi(s.substr(0, comma), &used);
        const std::string rest = s.substr(comma + 1);
        std::size_t used2 = 0;
        const int n = std::stoi(rest, &used2);
        if (used2 != rest.size()) throw std::invalid_argument(s);
        return {m, n};
    } catch (const std::logic_error&) {
        throw Error(ErrorKind::invalid_argument, "expected m,n but got '" + s + "'");
    }
}

/// Unit vector given as m,n or by name: 1, w, 1+w, -1, -w, -1-w.
Vertex parse_direction(const std::string& s)
{
    static const std::pair<const char*, Vertex> names[] = {
        {"1", {1, 0}}, {"w", {0, 1}}, {"1+w", {1, 1}}, {"-1", {-1, 0}}, {"-w", {0, -1}}, {"-1-w", {-1, -1}}};
    for (const auto& [name, v] : names) {
        if (s == name) return v;
    }
    const Vertex v = parse_vertex(s);
    if (!direction_slot(v)) throw Error(ErrorKind::invalid_argument, s + " is not a lattice unit vector");
    return v;
}

void print_json(const io::json& j) { std::cout << j.dump(1) << "\n"; }

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Discrete conformal toolkit for hexagonal triangulations"};
    app.require_subcommand(1);
    std::function<int()> action;

    // gen-linear
    double lin_m = 0.0;
    double lin_n = 0.0;
    int lin_r = 1;
    std::string lin_out;
    std::string lin_center = "0,0";
    auto* gen = app.add_subcommand("gen-linear", "Write the linear conformal factor w = mM + nN on a ball");
    gen->add_option("--m", lin_m, "Delta_1 w")->required();
    gen->add_option("--n", lin_n, "Delta_omega w")->required();
    gen->add_option("--radius", lin_r, "Ball radius")->required()->check(CLI::NonNegativeNumber);
    gen->add_option("--center", lin_center, "Ball center m,n");
    gen->add_option("--out", lin_out, "Output patch JSON")->required();
    gen->callback([&] {
        action = [&] {
            const ConformalPatch p = linear_factor(lin_m, lin_n, Ball(parse_vertex(lin_center), lin_r));
            io::save_patch(p, lin_out);
            return kOk;
        };
    });

    // curvature
    std::string patch_path;
    std::string out_path;
    auto* curv = app.add_subcommand("curvature", "Curvature report of a patch");
    curv->add_option("--patch", patch_path)->required();
    curv->add_option("--out", out_path);
    curv->callback([&] {
        action = [&] {
            const CurvatureReport r = curvature(io::load_patch(patch_path));
            if (!out_path.empty()) io::write_json(out_path, io::curvature_to_json(r));
            std::printf("max|K| = %.17g\ntheta_sup = %.17g\n", r.max_abs_K, r.max_inner_angle);
            return kOk;
        };
    });

    // verify-flat
    double flat_tol = 1e-9;
    auto* vflat = app.add_subcommand("verify-flat", "Exit 1 unless every interior |K| <= tol");
    vflat->add_option("--patch", patch_path)->required();
    vflat->add_option("--tol", flat_tol);
    vflat->callback([&] {
        action = [&] {
            const CurvatureReport r = curvature(io::load_patch(patch_path));
            const bool ok = r.max_abs_K <= flat_tol;
            std::printf("%s: max|K| = %.17g (tol %.3g)\n", ok ? "flat" : "not flat", r.max_abs_K, flat_tol);
            return ok ? kOk : kCheckFailed;
        };
    });

    // develop
    std::string svg_path;
    auto* dev = app.add_subcommand("develop", "Lay the patch out in the plane");
    dev->add_option("--patch", patch_path)->required();
    dev->add_option("--out", out_path)->required();
    dev->add_option("--svg", svg_path, "Also write an SVG figure with overlaps highlighted");
    dev->callback([&] {
        action = [&] {
            const LayoutResult l = develop(io::load_patch(patch_path));
            io::write_json(out_path, io::layout_to_json(l));
            if (!svg_path.empty()) io::save_svg(l, find_overlap(l), svg_path);
            std::printf("holonomy_residual = %.17g\n", l.holonomy_residual);
            return kOk;
        };
    });

    // overlap
    std::string layout_path;
    auto* ovl = app.add_subcommand("overlap", "Positive-area overlaps between non-adjacent faces");
    ovl->add_option("--layout", layout_path)->required();
    ovl->add_option("--out", out_path);
    ovl->callback([&] {
        action = [&] {
            const OverlapReport r = find_overlap(io::load_layout(layout_path));
            if (!out_path.empty()) io::write_json(out_path, io::overlaps_to_json(r));
            std::printf("%zu overlapping face pairs\n", r.pairs.size());
            return kOk;
        };
    });

    // overlap-radius
    int rmax = 64;
    auto* orad = app.add_subcommand("overlap-radius", "Smallest ball radius whose linear-factor layout overlaps");
    orad->add_option("--m", lin_m)->required();
    orad->add_option("--n", lin_n)->required();
    orad->add_option("--rmax", rmax)->check(CLI::PositiveNumber);
    orad->callback([&] {
        action = [&] {
            const auto w = overlap_radius(lin_m, lin_n, rmax);
            if (w) {
                std::printf("%d\n", w->radius);
            } else {
                std::printf("none\n");
            }
            return kOk;
        };
    });

    // similarity
    std::string at = "0,0";
    std::string dir = "1";
    int span = 2;
    auto* sim = app.add_subcommand("similarity", "Similarity z -> kz + b stepping along a lattice direction");
    sim->add_option("--layout", layout_path)->required();
    sim->add_option("--patch", patch_path)->required();
    sim->add_option("--at", at);
    sim->add_option("--dir", dir);
    sim->add_option("--span", span);
    sim->callback([&] {
        action = [&] {
            const Similarity T = extract_similarity(io::load_layout(layout_path), io::load_patch(patch_path),
                                                    parse_vertex(at), parse_direction(dir), span);
            io::json j;
            j["k"] = {T.k.real(), T.k.imag()};
            j["b"] = {T.b.real(), T.b.imag()};
            j["contraction_norm"] = T.contraction_norm;
            if (T.fixed_point) {
                j["fixed_point"] = {T.fixed_point->real(), T.fixed_point->imag()};
            } else {
                j["fixed_point"] = nullptr;
            }
            print_json(j);
            return kOk;
        };
    });

    // qh-weights
    std::string c_dir = "1";
    std::optional<double> theta;
    auto* qhw = app.add_subcommand("qh-weights", "Directed weights of Delta_c w at every eligible vertex");
    qhw->add_option("--patch", patch_path)->required();
    qhw->add_option("--c", c_dir, "Displacement m,n or unit name");
    qhw->add_option("--theta", theta, "Angle bound (default: largest angle of the patch)");
    qhw->add_option("--out", out_path)->required();
    qhw->callback([&] {
        action = [&] {
            const ConformalPatch p = io::load_patch(patch_path);
            const double bound = theta ? *theta : curvature(p).max_inner_angle;
            Vertex c;
            try {
                c = parse_direction(c_dir);
            } catch (const Error&) {
                c = parse_vertex(c_dir);
            }
            io::json arr = io::json::array();
            std::size_t skipped = 0;
            for (Vertex i : p.ball().interior()) {
                if (!p.ball().is_interior(i + c)) continue;
                try {
                    arr.push_back(io::weights_to_json(extract_weights(p, c, i, bound)));
                } catch (const Error& e) {
                    if (e.kind() != ErrorKind::not_flat && e.kind() != ErrorKind::not_acute) throw;
                    ++skipped;
                }
            }
            io::json j;
            j["theta_bound"] = bound;
            j["harmonic_factor_bound"] = harmonic_factor_bound(bound);
            j["weights"] = std::move(arr);
            io::write_json(out_path, j);
            std::printf("%zu vertices weighted, %zu skipped (not flat or not acute)\n", j["weights"].size(), skipped);
            return kOk;
        };
    });

    // qh-propagate
    std::string f_path;
    double factor = 1.0 / 6.0;
    std::string center = "0,0";
    int radius = 1;
    double level = 0.0;
    double eps = 0.1;
    auto* qhp = app.add_subcommand("qh-propagate", "Check the near-maximum propagation inequality on a ball");
    qhp->add_option("--f", f_path)->required();
    qhp->add_option("--factor", factor)->required();
    qhp->add_option("--center", center);
    qhp->add_option("--radius", radius)->required();
    qhp->add_option("--level", level)->required();
    qhp->add_option("--eps", eps)->required();
    qhp->callback([&] {
        action = [&] {
            const PropagationReport r =
                verify_propagation(io::load_values(f_path), factor, parse_vertex(center), radius, level, eps);
            io::json j;
            j["hypotheses_hold"] = r.hypotheses_hold;
            j["holds"] = r.holds;
            j["min_over_ball"] = r.min_over_ball;
            j["violations"] = io::json::array();
            for (Vertex v : r.violations) j["violations"].push_back({v.m, v.n});
            j["chain_violations"] = io::json::array();
            for (Vertex v : r.chain_violations) j["chain_violations"].push_back({v.m, v.n});
            print_json(j);
            return (r.hypotheses_hold && !r.holds) ? kCheckFailed : kOk;
        };
    });

    // qh-twofun
    std::string f1_path;
    std::string f2_path;
    int domain_r = 1;
    auto* qht = app.add_subcommand("qh-twofun", "Find a ball where two functions are both near constant");
    qht->add_option("--f1", f1_path)->required();
    qht->add_option("--f2", f2_path)->required();
    qht->add_option("--factor", factor)->required();
    qht->add_option("--radius", radius)->required();
    qht->add_option("--eps", eps)->required();
    qht->add_option("--domain", domain_r, "Domain ball radius around the origin")->required();
    qht->callback([&] {
        action = [&] {
            try {
                const NearConstantBall r = find_near_constant_ball(io::load_values(f1_path), io::load_values(f2_path),
                                                                   factor, radius, eps, Ball({0, 0}, domain_r));
                io::json j;
                j["center"] = {r.center.m, r.center.n};
                j["M"] = r.M;
                j["N"] = r.N;
                j["n"] = r.n;
                j["k"] = r.k;
                print_json(j);
                return kOk;
            } catch (const DomainTooSmall& e) {
                std::printf("domain-too-small: required radius %lld\n", e.required_radius());
                return kCheckFailed;
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::not_found) throw;
                std::printf("%s\n", e.what());
                return kCheckFailed;
            }
        };
    });

    // solve
    std::string problem_path;
    double solve_tol = 1e-10;
    int max_iter = 100;
    auto* slv = app.add_subcommand("solve", "Prescribed-curvature Newton solve with Dirichlet boundary");
    slv->add_option("--problem", problem_path)->required();
    slv->add_option("--tol", solve_tol);
    slv->add_option("--max-iter", max_iter);
    slv->add_option("--out", out_path)->required();
    slv->callback([&] {
        action = [&] {
            const SolveTrace t = solve(io::problem_from_json(io::read_json(problem_path), problem_path),
                                       solve_tol, max_iter);
            io::json j = io::patch_to_json(t.final_w);
            j["converged"] = t.converged;
            io::json res = io::json::array();
            for (const auto& it : t.iterations) res.push_back({it.residual_inf_norm, it.step_scale});
            j["iterations"] = std::move(res);
            io::write_json(out_path, j);
            std::printf("%s after %zu iterations, residual %.3g\n", t.converged ? "converged" : "not converged",
                        t.iterations.size() - 1, t.iterations.back().residual_inf_norm);
            return t.converged ? kOk : kCheckFailed;
        };
    });

    // cross-ratio
    std::string edge;
    auto* cr = app.add_subcommand("cross-ratio", "Length cross ratio of an interior edge");
    cr->add_option("--patch", patch_path)->required();
    cr->add_option("--edge", edge, "m,n:m,n")->required();
    cr->callback([&] {
        action = [&] {
            const auto colon = edge.find(':');
            if (colon == std::string::npos) throw Error(ErrorKind::invalid_argument, "edge must be m,n:m,n");
            const double x = length_cross_ratio(io::load_patch(patch_path), parse_vertex(edge.substr(0, colon)),
                                                parse_vertex(edge.substr(colon + 1)));
            std::printf("%.17g\n", x);
            return kOk;
        };
    });

    // check-bound
    double bound_tol = 1e-9;
    auto* cb = app.add_subcommand("check-bound", "Neighbor ratio exp(w(j)-w(i)) >= 1/6 at flat vertices");
    cb->add_option("--patch", patch_path)->required();
    cb->add_option("--tol", bound_tol, "Flatness tolerance");
    cb->callback([&] {
        action = [&] {
            const auto v = check_edge_ratio_bound(io::load_patch(patch_path), bound_tol);
            for (const auto& x : v) {
                std::printf("violation at %s -> %s: ratio %.17g\n", x.i.str().c_str(), x.j.str().c_str(), x.ratio);
            }
            std::printf("%zu violations\n", v.size());
            return v.empty() ? kOk : kCheckFailed;
        };
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kDataError;
    }
    try {
        return action ? action() : kDataError;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDataError;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kDataError;
    }
}
