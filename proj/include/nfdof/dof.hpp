// SPDX-License-Identifier: Apache-2.0
//
// Closed-form spatial-DoF predictions in the distance domain (broadside,
// projected non-broadside, modular lobe unions, distance sweeps, Rayleigh
// bound) and dominant-eigenvalue counting with threshold sensitivity.

#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfdof/geometry.hpp"
#include "nfdof/spectral.hpp"

namespace nfdof {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
    double width() const { return hi - lo; }
};

/// Continuous DoF estimate plus the xi intervals (one per module) whose
/// union measure it equals.
struct DofPrediction {
    double value = 0.0;
    std::vector<Interval> omega_intervals;
    std::string formula;
};

struct DominantCount {
    int count = 0;
    double epsilon = 0.0;
    int count_low_eps = 0;   // at epsilon / 10 (never smaller)
    int count_high_eps = 0;  // at epsilon * 10 (never larger)
};

namespace detail {

inline void check_radial_span(double r_min, double r_max) {
    if (!(r_min > 0.0) || !(r_max > r_min))
        throw std::invalid_argument("requires 0 < r_min < r_max");
}

inline Interval omega_interval(double p_min, double p_max, double T, double wavelength) {
    return {-p_max * p_max * T / (2.0 * wavelength), -p_min * p_min * T / (2.0 * wavelength)};
}

/// Sort-and-merge union; endpoints within 1e-12 relative tolerance merge, so
/// identical module lobes collapse deterministically.
inline std::vector<Interval> merge_intervals(std::vector<Interval> v) {
    std::sort(v.begin(), v.end(), [](const Interval& a, const Interval& b) {
        return a.lo < b.lo || (a.lo == b.lo && a.hi < b.hi);
    });
    std::vector<Interval> out;
    for (const auto& iv : v) {
        const double tol = 1e-12 * std::max({std::abs(iv.lo), std::abs(iv.hi), 1.0});
        if (!out.empty() && iv.lo <= out.back().hi + tol)
            out.back().hi = std::max(out.back().hi, iv.hi);
        else
            out.push_back(iv);
    }
    return out;
}

}  // namespace detail

/// (p_max^2 - p_min^2) / (2 lambda) * (1/r_min - 1/r_max). The sinc-sidelobe
/// O(1) term is reported as zero.
inline DofPrediction dof_broadside(double p_min, double p_max, double r_min, double r_max,
                                   double wavelength) {
    if (!(p_min >= 0.0) || !(p_max >= p_min))
        throw std::invalid_argument("dof_broadside: requires 0 <= p_min <= p_max");
    detail::check_radial_span(r_min, r_max);
    const double T = 1.0 / r_min - 1.0 / r_max;
    DofPrediction out;
    out.omega_intervals = {detail::omega_interval(p_min, p_max, T, wavelength)};
    out.value = out.omega_intervals.front().width();
    out.formula = "broadside";
    return out;
}

/// Union of the per-module lobes Omega_n; the DoF is the union's measure, so
/// disjoint lobes add and overlapping lobes count once.
inline DofPrediction dof_modular(const std::vector<ExtremeDistances>& modules, double r_min,
                                 double r_max, double wavelength) {
    detail::check_radial_span(r_min, r_max);
    const double T = 1.0 / r_min - 1.0 / r_max;
    std::vector<Interval> lobes;
    lobes.reserve(modules.size());
    for (const auto& e : modules)
        lobes.push_back(detail::omega_interval(e.p_min, e.p_max, T, wavelength));
    DofPrediction out;
    out.omega_intervals = detail::merge_intervals(lobes);
    out.value = 0.0;
    for (const auto& iv : out.omega_intervals) out.value += iv.width();
    out.formula = "modular";
    return out;
}

/// Projects the region onto the plane orthogonal to the direction and applies
/// the broadside formula to the projected extremes. Broadside directions use
/// the analytic region extremes; otherwise extremes come from a fine sampled
/// cloud (spacing defaults to lambda/4).
inline DofPrediction dof_projected(const ApertureRegion& region, const Direction& direction,
                                   double r_min, double r_max, double wavelength,
                                   double spacing = 0.0) {
    detail::check_radial_span(r_min, r_max);
    if (direction.is_broadside()) {
        const ExtremeDistances e = extreme_distances(region);
        DofPrediction out = dof_broadside(e.p_min, e.p_max, r_min, r_max, wavelength);
        return out;
    }
    if (spacing <= 0.0) spacing = wavelength / 4.0;
    const SampledAperture cloud = project_aperture(sample_aperture(region, spacing), direction);
    const ExtremeDistances e = extreme_distances(cloud);
    DofPrediction out = dof_broadside(e.p_min, e.p_max, r_min, r_max, wavelength);
    out.formula = "projected";
    return out;
}

/// Centered hole of fraction alpha in a symmetric array [-L, L]:
/// L^2 (1 - alpha^2) / (2 lambda) * (1/r_min - 1/r_max). Algebraically equal
/// to dof_modular over the two induced segments [alpha L, L], [-L, -alpha L].
inline DofPrediction dof_hole_fraction(double L, double alpha, double r_min, double r_max,
                                       double wavelength) {
    if (!(alpha >= 0.0) || alpha >= 1.0)
        throw std::invalid_argument("dof_hole_fraction: requires 0 <= alpha < 1");
    if (!(L > 0.0))
        throw std::invalid_argument("dof_hole_fraction: requires L > 0");
    detail::check_radial_span(r_min, r_max);
    DofPrediction out = dof_broadside(alpha * L, L, r_min, r_max, wavelength);
    out.formula = "hole-fraction";
    return out;
}

/// DoF against r_min at a fixed array length L:
/// ((p_max^2 - p_min^2) / 2 lambda) * L / (r_min (r_min + L)).
inline double dof_vs_rmin(double p_min, double p_max, double array_length, double r_min,
                          double wavelength) {
    if (!(r_min > 0.0) || !(array_length > 0.0))
        throw std::invalid_argument("dof_vs_rmin: requires positive arguments");
    return (p_max * p_max - p_min * p_min) / (2.0 * wavelength) * array_length /
           (r_min * (r_min + array_length));
}

/// Distance-domain DoF cap via the Rayleigh distance r_Ray = 2 D^2 / lambda:
/// (r_Ray / 16) / r_min.
inline double rayleigh_bound(double aperture_size, double r_min, double wavelength) {
    if (!(aperture_size > 0.0) || !(r_min > 0.0) || !(wavelength > 0.0))
        throw std::invalid_argument("rayleigh_bound: requires positive arguments");
    const double r_ray = 2.0 * aperture_size * aperture_size / wavelength;
    return r_ray / 16.0 / r_min;
}

/// Number of eigenvalues at or above epsilon * lambda_1, with companion
/// counts one decade looser and one decade tighter.
inline DominantCount count_dominant(const EigenSpectrum& spectrum, double epsilon) {
    if (spectrum.values.empty())
        throw std::invalid_argument("count_dominant: empty spectrum");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw std::invalid_argument("count_dominant: epsilon must be in (0, 1)");
    const double top = spectrum.values.front();
    auto count_at = [&](double eps) {
        int c = 0;
        for (double v : spectrum.values)
            if (v >= eps * top) ++c;
        return c;
    };
    DominantCount out;
    out.epsilon = epsilon;
    out.count = count_at(epsilon);
    out.count_low_eps = count_at(epsilon / 10.0);
    out.count_high_eps = count_at(std::min(epsilon * 10.0, 1.0));
    return out;
}

/// Prediction dispatcher: per-module (projected) extremes feed the modular
/// union, which reduces to the broadside / projected formula for a single
/// module. Used by the experiment runner.
inline DofPrediction predict_dof(const ApertureRegion& region, const Direction& direction,
                                 double r_min, double r_max, double wavelength,
                                 double spacing = 0.0) {
    detail::check_radial_span(r_min, r_max);
    const bool broadside = direction.is_broadside();
    std::vector<ExtremeDistances> extremes;
    if (broadside) {
        for (const auto& mod : region.modules) {
            ApertureRegion single;
            single.modules.push_back(mod);
            extremes.push_back(extreme_distances(single));
        }
    } else {
        if (spacing <= 0.0) spacing = wavelength / 4.0;
        const SampledAperture cloud =
            project_aperture(sample_aperture(region, spacing), direction);
        for (std::size_t m = 0; m + 1 < cloud.module_offsets.size(); ++m) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (std::size_t i = cloud.module_offsets[m]; i < cloud.module_offsets[m + 1]; ++i) {
                const double d = cloud.points[i].norm();
                lo = std::min(lo, d);
                hi = std::max(hi, d);
            }
            if (std::isfinite(lo)) extremes.push_back({lo, hi});
        }
    }
    DofPrediction out = dof_modular(extremes, r_min, r_max, wavelength);
    if (region.modules.size() == 1)
        out.formula = broadside ? "broadside" : "projected";
    else
        out.formula = broadside ? "modular" : "modular-projected";
    return out;
}

}  // namespace nfdof
