#pragma once

// Euclidean triangle calculus: angles from lengths, cotangent derivative
// formulas, a monotone deformation between two acute triangles sharing one
// edge, and the mean-value coefficients integrated along that deformation.

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "hexrigid/error.hpp"

namespace hexrigid {

inline constexpr double kPi = std::numbers::pi;

/// Angles (theta_i, theta_j, theta_k) in radians.
struct Angles {
    double i{0.0};
    double j{0.0};
    double k{0.0};

    [[nodiscard]] double operator[](int s) const { return s == 0 ? i : (s == 1 ? j : k); }
    [[nodiscard]] double max() const { return std::max({i, j, k}); }
};

/// Three edge lengths, each indexed by the opposite vertex.
struct Triangle {
    double li{1.0};
    double lj{1.0};
    double lk{1.0};

    [[nodiscard]] double operator[](int s) const { return s == 0 ? li : (s == 1 ? lj : lk); }

    [[nodiscard]] bool valid() const
    {
        return li > 0.0 && lj > 0.0 && lk > 0.0 && std::isfinite(li) && std::isfinite(lj) &&
               std::isfinite(lk) && li < lj + lk && lj < li + lk && lk < li + lj;
    }

    [[nodiscard]] std::string str() const
    {
        std::ostringstream os;
        os.precision(17);
        os << "(" << li << ", " << lj << ", " << lk << ")";
        return os.str();
    }
};

inline void require_valid(const Triangle& t)
{
    if (!t.valid()) throw Error(ErrorKind::invalid_triangle, "lengths " + t.str());
}

/// Interior angles by the half-angle tangent form of the law of cosines,
/// which keeps the angle sum at pi to a few ulps even for slivers.
inline Angles angles(const Triangle& t)
{
    require_valid(t);
    const double p = t.li + t.lj + t.lk;
    const double xi = t.lj + t.lk - t.li;
    const double xj = t.li + t.lk - t.lj;
    const double xk = t.li + t.lj - t.lk;
    return {2.0 * std::atan2(std::sqrt(xj * xk), std::sqrt(p * xi)),
            2.0 * std::atan2(std::sqrt(xi * xk), std::sqrt(p * xj)),
            2.0 * std::atan2(std::sqrt(xi * xj), std::sqrt(p * xk))};
}

inline double cot(double x) { return std::cos(x) / std::sin(x); }

/// Triangle with fixed l_i whose angles at j and k are the given values.
inline Triangle from_angles(double li, double theta_j, double theta_k)
{
    const double theta_i = kPi - theta_j - theta_k;
    const double s = std::sin(theta_i);
    return {li, li * std::sin(theta_j) / s, li * std::sin(theta_k) / s};
}

/// D[x][y] = d theta_x / d u_y with u_y = log l_y, all three lengths free.
/// Off-diagonal: -cot of the remaining angle. Diagonal: sum of the other two cotangents.
inline std::array<std::array<double, 3>, 3> angle_log_derivatives(const Triangle& t)
{
    const Angles a = angles(t);
    const std::array<double, 3> c{cot(a.i), cot(a.j), cot(a.k)};
    std::array<std::array<double, 3>, 3> d{};
    for (int x = 0; x < 3; ++x) {
        for (int y = 0; y < 3; ++y) {
            if (x == y) {
                d[x][y] = c[(x + 1) % 3] + c[(x + 2) % 3];
            } else {
                d[x][y] = -c[3 - x - y];
            }
        }
    }
    return d;
}

// ---------------------------------------------------------------------------
// Monotone deformation
// ---------------------------------------------------------------------------

/// Which construction produced a leg of the path.
enum class LegCase {
    angle_linear,      // theta_j, theta_k change in the same direction
    fixed_lj,          // l_j already at target, l_k linear
    fixed_lk,          // l_k already at target, l_j linear
    circumcircle,      // theta_i fixed, theta_j and theta_k trade off
    fixed_lj_sweep,    // l_j fixed, theta_k swept toward target
    fixed_lk_sweep,    // l_k fixed, theta_j swept toward target
};

inline std::string_view to_string(LegCase c)
{
    switch (c) {
        case LegCase::angle_linear: return "angle-linear";
        case LegCase::fixed_lj: return "fixed-lj";
        case LegCase::fixed_lk: return "fixed-lk";
        case LegCase::circumcircle: return "circumcircle";
        case LegCase::fixed_lj_sweep: return "fixed-lj-sweep";
        case LegCase::fixed_lk_sweep: return "fixed-lk-sweep";
    }
    return "unknown";
}

struct PathSample {
    double t{0.0};
    Triangle tri{};
    double uj{0.0};
    double uk{0.0};
};

/// Legs are stored back to back; leg l covers samples [l*steps, (l+1)*steps].
struct DeformPath {
    std::vector<PathSample> samples;
    std::vector<LegCase> legs;
    int steps_per_leg{0};
};

namespace detail {

struct LegState {
    Triangle tri;
    Angles ang;
};

inline LegState make_state(const Triangle& t) { return {t, angles(t)}; }

// Zero-snapping for case dispatch; events are resolved to ~1e-12.
inline int sign_tol(double d, double scale)
{
    const double tol = 1e-11 * std::max(1.0, std::abs(scale));
    if (d > tol) return 1;
    if (d < -tol) return -1;
    return 0;
}

// Leg parametrization s in [0,1] -> triangle.
struct Leg {
    LegCase kind;
    Triangle start;
    Angles start_angles;
    Triangle goal;
    Angles goal_angles;
    double span{0.0};   // circumcircle: signed theta_j increment at s = 1

    [[nodiscard]] Triangle at(double s) const
    {
        const double li = start.li;
        switch (kind) {
            case LegCase::angle_linear: {
                const double tj = start_angles.j + s * (goal_angles.j - start_angles.j);
                const double tk = start_angles.k + s * (goal_angles.k - start_angles.k);
                return from_angles(li, tj, tk);
            }
            case LegCase::fixed_lj:
            case LegCase::fixed_lk:
                return {li, start.lj + s * (goal.lj - start.lj), start.lk + s * (goal.lk - start.lk)};
            case LegCase::circumcircle:
                return from_angles(li, start_angles.j + s * span, start_angles.k - s * span);
            case LegCase::fixed_lj_sweep: {
                const double tk = start_angles.k + s * (goal_angles.k - start_angles.k);
                const double lj = start.lj;
                return {li, lj, std::sqrt(li * li + lj * lj - 2.0 * li * lj * std::cos(tk))};
            }
            case LegCase::fixed_lk_sweep: {
                const double tj = start_angles.j + s * (goal_angles.j - start_angles.j);
                const double lk = start.lk;
                return {li, std::sqrt(li * li + lk * lk - 2.0 * li * lk * std::cos(tj)), lk};
            }
        }
        return start;
    }

    [[nodiscard]] bool stops_on_event() const
    {
        return kind == LegCase::circumcircle || kind == LegCase::fixed_lj_sweep ||
               kind == LegCase::fixed_lk_sweep;
    }
};

// Quantity index: 0..2 angles i,j,k; 3 l_j; 4 l_k.
inline double quantity(const Triangle& t, const Angles& a, int q)
{
    switch (q) {
        case 0: return a.i;
        case 1: return a.j;
        case 2: return a.k;
        case 3: return t.lj;
        default: return t.lk;
    }
}

// First parameter in (0, 1] where some monotone quantity reaches its goal value.
inline double first_event(const Leg& leg, const Triangle& target, const Angles& target_angles)
{
    double stop = 1.0;
    for (int q = 0; q < 5; ++q) {
        const double goal = quantity(target, target_angles, q);
        auto gap = [&](double s) {
            Triangle t = leg.at(s);
            return quantity(t, angles(t), q) - goal;
        };
        const double g0 = gap(0.0);
        const double g1 = gap(stop);
        if (g0 == 0.0 || g0 * g1 > 0.0) continue;
        double lo = 0.0;
        double hi = stop;
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            if (gap(mid) * g0 > 0.0) {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        stop = std::min(stop, hi);
    }
    return stop;
}

inline Leg plan_leg(const LegState& cur, const Triangle& target, const Angles& ta)
{
    const int dj = sign_tol(ta.j - cur.ang.j, 1.0);
    const int dk = sign_tol(ta.k - cur.ang.k, 1.0);
    const int a = sign_tol(target.lj - cur.tri.lj, target.lj);
    const int b = sign_tol(target.lk - cur.tri.lk, target.lk);

    Leg leg{LegCase::angle_linear, cur.tri, cur.ang, target, ta, 0.0};
    if (dj * dk >= 0) return leg;
    if (a == 0) {
        leg.kind = LegCase::fixed_lj;
        return leg;
    }
    if (b == 0) {
        leg.kind = LegCase::fixed_lk;
        return leg;
    }
    if ((dj > 0 && a > 0 && b < 0) || (dj < 0 && a < 0 && b > 0)) {
        // theta_i held; theta_j moves toward its target at the rate theta_k moves toward its own
        leg.kind = LegCase::circumcircle;
        const double step = std::min(std::abs(ta.j - cur.ang.j), std::abs(ta.k - cur.ang.k));
        leg.span = dj > 0 ? step : -step;
        return leg;
    }
    // Remaining patterns have both lengths moving the same way. Sweep the angle
    // whose direction agrees with the lengths while the other length stays fixed.
    leg.kind = (dk == a) ? LegCase::fixed_lj_sweep : LegCase::fixed_lk_sweep;
    return leg;
}

}  // namespace detail

/// Sampled deformation from source to target keeping l_i fixed, with l_j, l_k and
/// all three angles monotone. Both triangles must be strictly acute.
inline DeformPath deform_path(const Triangle& source, const Triangle& target, int steps = 512)
{
    require_valid(source);
    require_valid(target);
    if (steps < 1) throw Error(ErrorKind::invalid_argument, "steps must be positive");
    if (source.li != target.li) {
        throw Error(ErrorKind::invalid_argument,
                    "l_i differs: " + source.str() + " vs " + target.str());
    }
    const Angles sa = angles(source);
    const Angles ta = angles(target);
    if (sa.max() >= kPi / 2 || ta.max() >= kPi / 2) {
        throw Error(ErrorKind::not_acute, "deformation requires strictly acute triangles");
    }

    std::vector<detail::Leg> legs;
    detail::LegState cur = detail::make_state(source);
    constexpr int kMaxLegs = 6;
    while (static_cast<int>(legs.size()) < kMaxLegs) {
        const bool at_target = detail::sign_tol(ta.j - cur.ang.j, 1.0) == 0 &&
                               detail::sign_tol(ta.k - cur.ang.k, 1.0) == 0;
        if (at_target && !legs.empty()) break;
        detail::Leg leg = detail::plan_leg(cur, target, ta);
        if (!leg.stops_on_event()) {
            legs.push_back(leg);
            break;
        }
        const double stop = detail::first_event(leg, target, ta);
        // Rescale so the leg ends exactly at the event.
        Triangle end = leg.at(stop);
        if (leg.kind == LegCase::circumcircle) {
            leg.span *= stop;
        } else {
            leg.goal = end;
            leg.goal_angles = angles(end);
        }
        legs.push_back(leg);
        cur = detail::make_state(end);
    }
    if (!legs.empty() && legs.back().stops_on_event()) {
        // Only reachable if dispatch kept producing event legs; close with the
        // direct construction for the remaining sliver.
        legs.push_back(detail::plan_leg(cur, target, ta));
    }

    DeformPath path;
    path.steps_per_leg = steps;
    const auto n_legs = static_cast<double>(legs.size());
    for (std::size_t l = 0; l < legs.size(); ++l) {
        path.legs.push_back(legs[l].kind);
        for (int q = (l == 0 ? 0 : 1); q <= steps; ++q) {
            const double s = static_cast<double>(q) / steps;
            Triangle tri = legs[l].at(s);
            if (l + 1 == legs.size() && q == steps) tri = target;
            path.samples.push_back({(static_cast<double>(l) + s) / n_legs, tri,
                                    std::log(tri.lj / source.lj), std::log(tri.lk / source.lk)});
        }
    }
    if (legs.empty()) {
        path.samples.push_back({0.0, source, 0.0, 0.0});
        path.samples.push_back({1.0, target, 0.0, 0.0});
    }
    return path;
}

/// Coefficients a, b with theta_i(target) - theta_i(source) = -a*u_j - b*u_k,
/// bounded by cot(theta) and cot(pi - 2 theta).
struct MeanValueCoeffs {
    double a{0.0};
    double b{0.0};
    double theta_bound{0.0};
    double lower{0.0};
    double upper{0.0};
    double uj{0.0};
    double uk{0.0};
};

inline double harmonic_lower(double theta) { return cot(theta); }
inline double harmonic_upper(double theta) { return cot(kPi - 2.0 * theta); }

inline MeanValueCoeffs mean_value_coeffs(const Triangle& source, const Triangle& target,
                                         double theta_bound, int steps = 2048)
{
    if (!(theta_bound < kPi / 2) || theta_bound <= kPi / 3 - 1e-15) {
        throw Error(ErrorKind::invalid_argument, "theta bound must lie in [pi/3, pi/2)");
    }
    const Angles sa = angles(source);
    const Angles ta = angles(target);
    // Scaled targets reproduce the bound only up to rounding.
    const double slack = 1e-12;
    if (sa.max() > theta_bound + slack || ta.max() > theta_bound + slack) {
        throw Error(ErrorKind::not_acute, "an angle exceeds the bound");
    }
    if (steps < 2 || steps % 2 != 0) {
        throw Error(ErrorKind::invalid_argument, "quadrature needs an even number of steps");
    }
    const DeformPath path = deform_path(source, target, steps);

    // Trapezoid in u along each leg at spacing h and 2h, combined by Richardson
    // extrapolation. Increments of u share one sign along the path.
    std::vector<double> cot_j(path.samples.size());
    std::vector<double> cot_k(path.samples.size());
    for (std::size_t s = 0; s < path.samples.size(); ++s) {
        const Angles ang = angles(path.samples[s].tri);
        cot_j[s] = cot(ang.j);
        cot_k[s] = cot(ang.k);
    }
    auto trapezoid = [&](std::size_t first, std::size_t last, std::size_t stride) {
        double ia = 0.0;
        double ib = 0.0;
        for (std::size_t s = first; s + stride <= last; s += stride) {
            const PathSample& p0 = path.samples[s];
            const PathSample& p1 = path.samples[s + stride];
            ia += 0.5 * (cot_k[s] + cot_k[s + stride]) * (p1.uj - p0.uj);
            ib += 0.5 * (cot_j[s] + cot_j[s + stride]) * (p1.uk - p0.uk);
        }
        return std::array<double, 2>{ia, ib};
    };
    double int_a = 0.0;
    double int_b = 0.0;
    const auto per_leg = static_cast<std::size_t>(path.steps_per_leg);
    for (std::size_t l = 0; l < path.legs.size(); ++l) {
        const std::size_t first = l * per_leg;
        const std::size_t last = first + per_leg;
        const auto fine = trapezoid(first, last, 1);
        const auto coarse = trapezoid(first, last, 2);
        int_a += (4.0 * fine[0] - coarse[0]) / 3.0;
        int_b += (4.0 * fine[1] - coarse[1]) / 3.0;
    }
    const double sum_duj = path.samples.back().uj - path.samples.front().uj;
    const double sum_duk = path.samples.back().uk - path.samples.front().uk;

    MeanValueCoeffs out;
    out.theta_bound = theta_bound;
    out.lower = harmonic_lower(theta_bound);
    out.upper = harmonic_upper(theta_bound);
    out.uj = std::log(target.lj / source.lj);
    out.uk = std::log(target.lk / source.lk);
    // A vanishing increment leaves its coefficient free; take the endpoint cotangent.
    constexpr double kZero = 1e-14;
    out.a = std::abs(sum_duj) > kZero ? int_a / sum_duj
                                      : std::clamp(cot(ta.k), out.lower, out.upper);
    out.b = std::abs(sum_duk) > kZero ? int_b / sum_duk
                                      : std::clamp(cot(ta.j), out.lower, out.upper);
    return out;
}

}  // namespace hexrigid
