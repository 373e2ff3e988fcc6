// SPDX-License-Identifier: Apache-2.0
//
// nfdof -- spatial degrees of freedom of near-field LoS channels in the
// distance domain.
//
// Geometry: transmit apertures (planar regions in the xz-plane built from
// rectangle/disk/annulus/segment primitives, with holes and modular unions),
// receive arrays (a direction plus a radial span), quadrature sampling,
// extreme distances and the orthogonal-plane projection.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace nfdof {

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
    Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
    Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }

    double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
    double squared_norm() const { return dot(*this); }
    double norm() const { return std::sqrt(squared_norm()); }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

/// Point in the aperture plane; maps to (x, 0, z) in space.
struct Vec2 {
    double x = 0.0;
    double z = 0.0;

    double squared_norm() const { return x * x + z * z; }
    double norm() const { return std::sqrt(squared_norm()); }
};

/// Unit direction u = [cos(phi)cos(theta), sin(phi)cos(theta), sin(theta)].
/// Defaults to broadside (phi = pi/2, theta = 0, u = [0, 1, 0]).
struct Direction {
    double phi = 1.5707963267948966;
    double theta = 0.0;
    Vec3 u{0.0, 1.0, 0.0};

    /// True when u is orthogonal to the xz-plane (the broadside case).
    bool is_broadside(double tol = 1e-12) const {
        return std::abs(u.x) <= tol && std::abs(u.z) <= tol;
    }
};

inline Direction direction_vector(double phi, double theta) {
    if (!std::isfinite(phi) || !std::isfinite(theta))
        throw std::invalid_argument("direction angles must be finite");
    Direction d;
    d.phi = phi;
    d.theta = theta;
    d.u = {std::cos(phi) * std::cos(theta), std::sin(phi) * std::cos(theta),
           std::sin(theta)};
    return d;
}

inline Direction broadside_direction() { return Direction{}; }

/// p - (u.p)u, the projection onto the plane through the origin orthogonal to u.
inline Vec3 project_onto_plane(const Vec3& p, const Vec3& u) {
    const double s = u.dot(p);
    return {p.x - s * u.x, p.y - s * u.y, p.z - s * u.z};
}

enum class ShapeKind { Rectangle, Disk, Annulus, Segment };

/// One aperture primitive, additive by default or subtractive (a hole).
/// Rectangles are axis-aligned in the xz-plane; segments are 1D pieces.
struct Primitive {
    ShapeKind kind = ShapeKind::Rectangle;
    bool subtractive = false;
    Vec2 center;                 // rectangle / disk / annulus
    double width = 0.0;          // rectangle extent along x
    double height = 0.0;         // rectangle extent along z
    double inner_radius = 0.0;   // annulus
    double outer_radius = 0.0;   // disk / annulus
    Vec2 seg_a, seg_b;           // segment endpoints

    static Primitive rectangle(Vec2 c, double w, double h, bool subtract = false) {
        Primitive p;
        p.kind = ShapeKind::Rectangle;
        p.center = c;
        p.width = w;
        p.height = h;
        p.subtractive = subtract;
        return p;
    }
    static Primitive disk(Vec2 c, double radius, bool subtract = false) {
        Primitive p;
        p.kind = ShapeKind::Disk;
        p.center = c;
        p.outer_radius = radius;
        p.subtractive = subtract;
        return p;
    }
    static Primitive annulus(Vec2 c, double inner, double outer, bool subtract = false) {
        Primitive p;
        p.kind = ShapeKind::Annulus;
        p.center = c;
        p.inner_radius = inner;
        p.outer_radius = outer;
        p.subtractive = subtract;
        return p;
    }
    static Primitive segment(Vec2 a, Vec2 b) {
        Primitive p;
        p.kind = ShapeKind::Segment;
        p.seg_a = a;
        p.seg_b = b;
        return p;
    }

    bool is_area_primitive() const { return kind != ShapeKind::Segment; }

    /// Signed-measure size: area for 2D shapes, length for segments.
    double measure() const {
        switch (kind) {
        case ShapeKind::Rectangle: return width * height;
        case ShapeKind::Disk: return std::acos(-1.0) * outer_radius * outer_radius;
        case ShapeKind::Annulus:
            return std::acos(-1.0) * (outer_radius * outer_radius - inner_radius * inner_radius);
        case ShapeKind::Segment: {
            const double dx = seg_b.x - seg_a.x, dz = seg_b.z - seg_a.z;
            return std::sqrt(dx * dx + dz * dz);
        }
        }
        return 0.0;
    }

    /// Containment test for area primitives. `strict` shrinks to the open set,
    /// used when testing against holes so boundary points survive.
    bool contains(const Vec2& q, bool strict = false) const {
        const double eps = strict ? 1e-12 * scale_hint() : -1e-12 * scale_hint();
        switch (kind) {
        case ShapeKind::Rectangle:
            return std::abs(q.x - center.x) < width / 2.0 - eps &&
                   std::abs(q.z - center.z) < height / 2.0 - eps;
        case ShapeKind::Disk: {
            const double dx = q.x - center.x, dz = q.z - center.z;
            const double r = std::sqrt(dx * dx + dz * dz);
            return r < outer_radius - eps;
        }
        case ShapeKind::Annulus: {
            const double dx = q.x - center.x, dz = q.z - center.z;
            const double r = std::sqrt(dx * dx + dz * dz);
            return r > inner_radius + eps && r < outer_radius - eps;
        }
        case ShapeKind::Segment:
            return false;  // zero area: never claims 2D points
        }
        return false;
    }

    double scale_hint() const {
        switch (kind) {
        case ShapeKind::Rectangle: return std::max(width, height);
        case ShapeKind::Disk:
        case ShapeKind::Annulus: return outer_radius;
        case ShapeKind::Segment: return measure();
        }
        return 1.0;
    }
};

/// One connected sub-array P^(n) of a (possibly modular) aperture.
struct ApertureModule {
    std::vector<Primitive> primitives;
};

/// Transmit aperture: disjoint union of modules, each built from additive
/// primitives minus holes.
struct ApertureRegion {
    std::vector<ApertureModule> modules;

    static ApertureRegion single(std::vector<Primitive> prims) {
        ApertureRegion r;
        r.modules.push_back(ApertureModule{std::move(prims)});
        return r;
    }
    bool empty() const {
        for (const auto& m : modules)
            for (const auto& p : m.primitives)
                if (!p.subtractive) return false;
        return true;
    }
};

/// Quadrature point cloud over an aperture. Points start in the xz-plane
/// (y = 0); project_aperture may move them off it. Weights are the per-point
/// quadrature measure; `module_offsets` marks where each module's points
/// begin (one extra trailing entry equal to points.size()).
struct SampledAperture {
    std::vector<Vec3> points;
    std::vector<double> weights;
    double spacing = 0.0;
    std::vector<std::size_t> module_offsets;

    std::size_t size() const { return points.size(); }
    double total_weight() const {
        double s = 0.0;
        for (double w : weights) s += w;
        return s;
    }
};

enum class RadialSampling { UniformInR, UniformInInverseR };

/// Receive linear array: all elements share direction u, spanning
/// r in [r_min, r_max].
struct ReceiveArray {
    Direction direction;
    double r_min = 0.0;
    double r_max = 0.0;
    int count = 0;
    RadialSampling sampling = RadialSampling::UniformInInverseR;
};

struct ExtremeDistances {
    double p_min = 0.0;
    double p_max = 0.0;
};

namespace detail {

struct ModuleSamples {
    std::vector<Vec2> points;
    std::vector<double> weights;
};

inline bool inside_any_additive(const ApertureModule& m, const Vec2& q) {
    for (const auto& p : m.primitives)
        if (!p.subtractive && p.is_area_primitive() && p.contains(q)) return true;
    return false;
}

inline bool inside_any_hole(const ApertureModule& m, const Vec2& q) {
    for (const auto& p : m.primitives)
        if (p.subtractive && p.contains(q, /*strict=*/true)) return true;
    return false;
}

inline void bbox_of_area_primitives(const ApertureModule& m, double& x0, double& x1,
                                    double& z0, double& z1, bool& any) {
    any = false;
    x0 = z0 = std::numeric_limits<double>::infinity();
    x1 = z1 = -std::numeric_limits<double>::infinity();
    for (const auto& p : m.primitives) {
        if (p.subtractive || !p.is_area_primitive()) continue;
        double px0, px1, pz0, pz1;
        if (p.kind == ShapeKind::Rectangle) {
            px0 = p.center.x - p.width / 2.0;
            px1 = p.center.x + p.width / 2.0;
            pz0 = p.center.z - p.height / 2.0;
            pz1 = p.center.z + p.height / 2.0;
        } else {
            px0 = p.center.x - p.outer_radius;
            px1 = p.center.x + p.outer_radius;
            pz0 = p.center.z - p.outer_radius;
            pz1 = p.center.z + p.outer_radius;
        }
        x0 = std::min(x0, px0);
        x1 = std::max(x1, px1);
        z0 = std::min(z0, pz0);
        z1 = std::max(z1, pz1);
        any = true;
    }
}

/// Cell-center grid fitted to the module bounding box, clipped to the region.
inline void sample_module_area(const ApertureModule& m, double spacing, ModuleSamples& out) {
    double x0, x1, z0, z1;
    bool any;
    bbox_of_area_primitives(m, x0, x1, z0, z1, any);
    if (!any) return;
    const double w = x1 - x0, h = z1 - z0;
    const long nx = std::max<long>(1, std::lround(w / spacing));
    const long nz = std::max<long>(1, std::lround(h / spacing));
    const double dx = (nx > 0 && w > 0.0) ? w / double(nx) : spacing;
    const double dz = (nz > 0 && h > 0.0) ? h / double(nz) : spacing;
    const double cell = (w > 0.0 ? dx : spacing) * (h > 0.0 ? dz : spacing);
    const std::size_t before = out.points.size();
    for (long i = 0; i < nx; ++i) {
        const double px = (w > 0.0) ? x0 + (double(i) + 0.5) * dx : x0;
        for (long j = 0; j < nz; ++j) {
            const double pz = (h > 0.0) ? z0 + (double(j) + 0.5) * dz : z0;
            const Vec2 q{px, pz};
            if (inside_any_additive(m, q) && !inside_any_hole(m, q)) {
                out.points.push_back(q);
                out.weights.push_back(cell);
            }
        }
    }
    if (out.points.size() == before) {
        // Tiny positive area that the grid missed: treat as a point source.
        double area = 0.0;
        const Primitive* first = nullptr;
        for (const auto& p : m.primitives) {
            if (p.subtractive || !p.is_area_primitive()) continue;
            area += p.measure();
            if (!first) first = &p;
        }
        for (const auto& p : m.primitives)
            if (p.subtractive) area -= p.measure();
        if (first && area >= 0.0) {
            out.points.push_back(first->center);
            out.weights.push_back(std::max(area, spacing * spacing));
        }
    }
}

inline void sample_module_segments(const ApertureModule& m, double spacing, ModuleSamples& out) {
    for (const auto& p : m.primitives) {
        if (p.kind != ShapeKind::Segment || p.subtractive) continue;
        const double len = p.measure();
        if (len <= 0.0) {
            out.points.push_back(p.seg_a);
            out.weights.push_back(spacing * spacing);
            continue;
        }
        const long n = std::max<long>(2, std::lround(len / spacing) + 1);
        const double step = len / double(n - 1);
        for (long i = 0; i < n; ++i) {
            const double f = double(i) / double(n - 1);
            const Vec2 q{p.seg_a.x + f * (p.seg_b.x - p.seg_a.x),
                         p.seg_a.z + f * (p.seg_b.z - p.seg_a.z)};
            if (inside_any_hole(m, q)) continue;
            out.points.push_back(q);
            out.weights.push_back(spacing * step);
        }
    }
}

}  // namespace detail

/// Quadrature sampling of the region: cell-center (midpoint) grid for area
/// primitives, node sampling with endpoints for segments. Points are sorted
/// lexicographically by (x, z) within each module; modules keep declaration
/// order, so the cloud of a modular region is the concatenation of its
/// per-module clouds.
inline SampledAperture sample_aperture(const ApertureRegion& region, double spacing) {
    if (spacing <= 0.0 || !std::isfinite(spacing))
        throw std::invalid_argument("sample_aperture: spacing must be positive");
    if (region.empty())
        throw std::invalid_argument("degenerate aperture");

    SampledAperture out;
    out.spacing = spacing;
    for (const auto& m : region.modules) {
        detail::ModuleSamples ms;
        detail::sample_module_area(m, spacing, ms);
        detail::sample_module_segments(m, spacing, ms);
        std::vector<std::size_t> order(ms.points.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (ms.points[a].x != ms.points[b].x) return ms.points[a].x < ms.points[b].x;
            return ms.points[a].z < ms.points[b].z;
        });
        out.module_offsets.push_back(out.points.size());
        for (std::size_t i : order) {
            out.points.push_back({ms.points[i].x, 0.0, ms.points[i].z});
            out.weights.push_back(ms.weights[i]);
        }
    }
    out.module_offsets.push_back(out.points.size());
    if (out.points.empty())
        throw std::invalid_argument("degenerate aperture");
    return out;
}

namespace detail {

struct Candidate {
    Vec2 point;
    bool valid = false;
};

inline Vec2 nearest_point_rect(const Primitive& p) {
    const double x = std::clamp(0.0, p.center.x - p.width / 2.0, p.center.x + p.width / 2.0);
    const double z = std::clamp(0.0, p.center.z - p.height / 2.0, p.center.z + p.height / 2.0);
    return {x, z};
}

inline Vec2 farthest_point_rect(const Primitive& p) {
    const double x = (p.center.x >= 0.0) ? p.center.x + p.width / 2.0 : p.center.x - p.width / 2.0;
    const double z = (p.center.z >= 0.0) ? p.center.z + p.height / 2.0 : p.center.z - p.height / 2.0;
    return {x, z};
}

inline Vec2 radial_point(const Vec2& c, double radius, bool outward) {
    const double d = c.norm();
    if (d <= 0.0) return {radius, 0.0};
    const double s = (outward ? d + radius : d - radius) / d;
    return {c.x * s, c.z * s};
}

inline Vec2 nearest_point(const Primitive& p) {
    switch (p.kind) {
    case ShapeKind::Rectangle: return nearest_point_rect(p);
    case ShapeKind::Disk: {
        const double d = p.center.norm();
        if (d <= p.outer_radius) return {0.0, 0.0};
        return radial_point(p.center, p.outer_radius, false);
    }
    case ShapeKind::Annulus: {
        const double d = p.center.norm();
        if (d > p.outer_radius) return radial_point(p.center, p.outer_radius, false);
        if (d < p.inner_radius) {
            if (d <= 0.0) return {p.inner_radius, 0.0};
            return radial_point(p.center, p.inner_radius, false);  // inward past center
        }
        return {0.0, 0.0};  // origin lies in the ring body
    }
    case ShapeKind::Segment: {
        const double dx = p.seg_b.x - p.seg_a.x, dz = p.seg_b.z - p.seg_a.z;
        const double len2 = dx * dx + dz * dz;
        if (len2 <= 0.0) return p.seg_a;
        const double f = std::clamp(-(p.seg_a.x * dx + p.seg_a.z * dz) / len2, 0.0, 1.0);
        return {p.seg_a.x + f * dx, p.seg_a.z + f * dz};
    }
    }
    return {0.0, 0.0};
}

inline Vec2 farthest_point(const Primitive& p) {
    switch (p.kind) {
    case ShapeKind::Rectangle: return farthest_point_rect(p);
    case ShapeKind::Disk:
    case ShapeKind::Annulus: {
        const double d = p.center.norm();
        if (d <= 0.0) return {p.outer_radius, 0.0};
        return radial_point(p.center, p.outer_radius, true);
    }
    case ShapeKind::Segment:
        return (p.seg_a.squared_norm() >= p.seg_b.squared_norm()) ? p.seg_a : p.seg_b;
    }
    return {0.0, 0.0};
}

/// Points along a hole boundary, for extreme-distance candidates when a
/// primitive's own extreme point is swallowed by the hole.
inline void hole_boundary_candidates(const Primitive& hole, std::vector<Vec2>& out) {
    constexpr int kSteps = 4096;
    const double pi = std::acos(-1.0);
    switch (hole.kind) {
    case ShapeKind::Disk:
    case ShapeKind::Annulus: {
        for (int i = 0; i < kSteps; ++i) {
            const double a = 2.0 * pi * double(i) / kSteps;
            out.push_back({hole.center.x + hole.outer_radius * std::cos(a),
                           hole.center.z + hole.outer_radius * std::sin(a)});
            if (hole.kind == ShapeKind::Annulus)
                out.push_back({hole.center.x + hole.inner_radius * std::cos(a),
                               hole.center.z + hole.inner_radius * std::sin(a)});
        }
        break;
    }
    case ShapeKind::Rectangle: {
        const double x0 = hole.center.x - hole.width / 2.0, x1 = hole.center.x + hole.width / 2.0;
        const double z0 = hole.center.z - hole.height / 2.0, z1 = hole.center.z + hole.height / 2.0;
        for (int i = 0; i <= kSteps; ++i) {
            const double f = double(i) / kSteps;
            out.push_back({x0 + f * (x1 - x0), z0});
            out.push_back({x0 + f * (x1 - x0), z1});
            out.push_back({x0, z0 + f * (z1 - z0)});
            out.push_back({x1, z0 + f * (z1 - z0)});
        }
        break;
    }
    case ShapeKind::Segment:
        break;
    }
}

}  // namespace detail

/// Extreme distances from the origin to the region. Analytic for additive
/// primitive compositions; holes contribute boundary candidates sampled
/// finely along the hole outline (exact for centered holes). The min/max of
/// the holed set lies at an additive extreme point or on a hole boundary,
/// so the candidate set is complete up to the boundary-step resolution.
inline ExtremeDistances extreme_distances(const ApertureRegion& region) {
    if (region.empty())
        throw std::invalid_argument("degenerate aperture");

    double best_min = std::numeric_limits<double>::infinity();
    double best_max = 0.0;
    auto take = [&](double d) {
        best_min = std::min(best_min, d);
        best_max = std::max(best_max, d);
    };

    for (const auto& m : region.modules) {
        const bool has_holes = std::any_of(
            m.primitives.begin(), m.primitives.end(),
            [](const Primitive& p) { return p.subtractive; });

        for (const auto& p : m.primitives) {
            if (p.subtractive) continue;
            const Vec2 np = detail::nearest_point(p);
            const Vec2 fp = detail::farthest_point(p);
            if (!has_holes || !detail::inside_any_hole(m, np)) take(np.norm());
            if (!has_holes || !detail::inside_any_hole(m, fp)) take(fp.norm());
            if (has_holes && p.kind == ShapeKind::Segment) {
                constexpr int kSteps = 4096;
                for (int i = 0; i <= kSteps; ++i) {
                    const double f = double(i) / kSteps;
                    const Vec2 q{p.seg_a.x + f * (p.seg_b.x - p.seg_a.x),
                                 p.seg_a.z + f * (p.seg_b.z - p.seg_a.z)};
                    if (!detail::inside_any_hole(m, q)) take(q.norm());
                }
            }
        }
        if (has_holes) {
            std::vector<Vec2> cands;
            for (const auto& p : m.primitives)
                if (p.subtractive) detail::hole_boundary_candidates(p, cands);
            for (const auto& q : cands) {
                if (!detail::inside_any_additive(m, q)) continue;
                if (detail::inside_any_hole(m, q)) continue;
                take(q.norm());
            }
        }
    }
    if (!std::isfinite(best_min))
        throw std::invalid_argument("degenerate aperture");
    return {best_min, best_max};
}

/// Extremes of an already-sampled (possibly projected) cloud.
inline ExtremeDistances extreme_distances(const SampledAperture& aperture) {
    if (aperture.points.empty())
        throw std::invalid_argument("degenerate aperture");
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const auto& p : aperture.points) {
        const double d = p.norm();
        lo = std::min(lo, d);
        hi = std::max(hi, d);
    }
    return {lo, hi};
}

/// Maps every point by (I - uu^T); weights carry over unchanged, so the
/// cloud quadrature becomes the pushforward measure on the projected plane.
inline SampledAperture project_aperture(const SampledAperture& aperture, const Direction& dir) {
    SampledAperture out = aperture;
    for (auto& p : out.points) p = project_onto_plane(p, dir.u);
    return out;
}

/// Receive samples with quadrature weights kept in both parameterizations:
/// r_weights discretize dr, t_weights discretize dt = dr/r^2. Samples are
/// endpoint-inclusive; uniform-in-inverse-r (the default) is uniform in
/// t = 1/r, listed in ascending t.
struct ReceiveSamples {
    Direction direction;
    std::vector<double> radii;
    std::vector<double> t_values;
    std::vector<Vec3> points;
    std::vector<double> r_weights;
    std::vector<double> t_weights;
    double r_min = 0.0, r_max = 0.0;
};

inline ReceiveSamples sample_receive_array(const ReceiveArray& array) {
    if (!(array.r_min > 0.0) || !(array.r_max > array.r_min))
        throw std::invalid_argument("receive array requires 0 < r_min < r_max");
    if (array.count < 2)
        throw std::invalid_argument("receive array requires count >= 2");

    const int n = array.count;
    ReceiveSamples out;
    out.direction = array.direction;
    out.r_min = array.r_min;
    out.r_max = array.r_max;
    out.radii.resize(n);
    out.t_values.resize(n);
    out.r_weights.resize(n);
    out.t_weights.resize(n);
    out.points.resize(n);

    if (array.sampling == RadialSampling::UniformInInverseR) {
        const double t_min = 1.0 / array.r_max, t_max = 1.0 / array.r_min;
        const double dt = (t_max - t_min) / double(n - 1);
        for (int k = 0; k < n; ++k) {
            const double t = (k == n - 1) ? t_max : t_min + dt * k;
            const double trap = (k == 0 || k == n - 1) ? 0.5 : 1.0;
            out.t_values[k] = t;
            out.radii[k] = 1.0 / t;
            out.t_weights[k] = dt * trap;
            out.r_weights[k] = dt * trap / (t * t);
        }
    } else {
        const double dr = (array.r_max - array.r_min) / double(n - 1);
        for (int k = 0; k < n; ++k) {
            const double r = (k == n - 1) ? array.r_max : array.r_min + dr * k;
            const double trap = (k == 0 || k == n - 1) ? 0.5 : 1.0;
            out.radii[k] = r;
            out.t_values[k] = 1.0 / r;
            out.r_weights[k] = dr * trap;
            out.t_weights[k] = dr * trap / (r * r);
        }
    }
    for (int k = 0; k < n; ++k) out.points[k] = array.direction.u * out.radii[k];
    return out;
}

}  // namespace nfdof
