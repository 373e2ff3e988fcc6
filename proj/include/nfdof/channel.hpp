// SPDX-License-Identifier: Apache-2.0
//
// LoS channel coefficients between aperture samples and receive samples,
// exact spherical-wave or Fresnel-approximated, plus the third-order phase
// error bound that governs where the Fresnel model is trustworthy.

#pragma once

#include <complex>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Core>

#include "nfdof/geometry.hpp"

namespace nfdof {

enum class ChannelVariant { Exact, Fresnel };

struct ChannelModel {
    ChannelVariant variant = ChannelVariant::Fresnel;
    double wavelength = 1.0;
};

namespace detail {

inline int thread_count(std::size_t work_items) {
    int n = 0;
    if (const char* env = std::getenv("NFDOF_THREADS")) {
        n = std::atoi(env);
    }
    if (n <= 0) n = int(std::thread::hardware_concurrency());
    if (n <= 0) n = 1;
    if (std::size_t(n) > work_items) n = int(work_items);
    return std::max(1, n);
}

/// Deterministic row-sliced parallel loop: every row is computed by exactly
/// one thread and written to its own slot, so results are schedule-independent.
template <typename Fn>
inline void parallel_for(std::size_t n, Fn&& fn) {
    const int threads = thread_count(n);
    if (threads == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (int t = 0; t < threads; ++t) {
        pool.emplace_back([&, t] {
            for (std::size_t i = std::size_t(t); i < n; i += std::size_t(threads)) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

}  // namespace detail

/// h(p, q) = exp(-j 2 pi |p - q| / lambda) / |p - q|.
inline std::complex<double> exact_coefficient(const Vec3& p, const Vec3& q, double wavelength) {
    if (!(wavelength > 0.0))
        throw std::invalid_argument("wavelength must be positive");
    const double d = (p - q).norm();
    if (d <= 0.0)
        throw std::invalid_argument("zero propagation distance");
    const double two_pi = 2.0 * std::acos(-1.0);
    return std::polar(1.0 / d, -two_pi * d / wavelength);
}

/// Fresnel coefficient with the element-independent exp(-j 2 pi r / lambda)
/// factor removed: magnitude 1/r, phase
/// (2 pi / lambda) (u.p - (|p|^2 - (u.p)^2) / (2 r)).
/// Dropping the common factor multiplies each receive row of H by a unit
/// scalar, which leaves the eigenvalues of the channel correlation unchanged.
inline std::complex<double> fresnel_coefficient(const Vec3& p, const Direction& dir, double r,
                                                double wavelength) {
    if (!(r > 0.0))
        throw std::invalid_argument("fresnel_coefficient: r must be positive");
    if (!(wavelength > 0.0))
        throw std::invalid_argument("wavelength must be positive");
    const double up = dir.u.dot(p);
    const double quad = p.squared_norm() - up * up;
    const double two_pi = 2.0 * std::acos(-1.0);
    const double phase = (two_pi / wavelength) * (up - quad / (2.0 * r));
    return std::polar(1.0 / r, phase);
}

/// Channel matrix H, K receive samples by M aperture samples, carrying the
/// quadrature metadata needed to assemble the correlation operator.
struct ChannelMatrix {
    Eigen::MatrixXcd entries;
    std::vector<double> rx_radii;
    std::vector<double> rx_t_values;
    std::vector<double> rx_r_weights;
    std::vector<double> rx_t_weights;
    std::vector<double> tx_weights;
    ChannelModel model;

    Eigen::Index rx_count() const { return entries.rows(); }
    Eigen::Index tx_count() const { return entries.cols(); }
};

inline ChannelMatrix build_channel_matrix(const SampledAperture& aperture,
                                          const ReceiveSamples& rx, const ChannelModel& model) {
    const std::size_t m = aperture.size();
    const std::size_t k = rx.radii.size();
    if (m == 0 || k == 0)
        throw std::invalid_argument("build_channel_matrix: empty samples");

    ChannelMatrix out;
    out.model = model;
    out.rx_radii = rx.radii;
    out.rx_t_values = rx.t_values;
    out.rx_r_weights = rx.r_weights;
    out.rx_t_weights = rx.t_weights;
    out.tx_weights = aperture.weights;
    out.entries.resize(Eigen::Index(k), Eigen::Index(m));

    const double two_pi = 2.0 * std::acos(-1.0);
    const double lambda = model.wavelength;

    if (model.variant == ChannelVariant::Exact) {
        // Detect coincident points up front so the error does not depend on
        // the parallel schedule.
        for (std::size_t row = 0; row < k; ++row)
            for (std::size_t col = 0; col < m; ++col)
                if ((aperture.points[col] - rx.points[row]).squared_norm() <= 0.0)
                    throw std::invalid_argument("zero propagation distance");
        detail::parallel_for(k, [&](std::size_t row) {
            const Vec3 q = rx.points[row];
            for (std::size_t col = 0; col < m; ++col) {
                const double d = (aperture.points[col] - q).norm();
                out.entries(Eigen::Index(row), Eigen::Index(col)) =
                    std::polar(1.0 / d, -two_pi * d / lambda);
            }
        });
    } else {
        // Precompute the direction-dependent per-point terms once.
        std::vector<double> up(m), quad(m);
        for (std::size_t col = 0; col < m; ++col) {
            up[col] = rx.direction.u.dot(aperture.points[col]);
            quad[col] = aperture.points[col].squared_norm() - up[col] * up[col];
        }
        detail::parallel_for(k, [&](std::size_t row) {
            const double r = rx.radii[row];
            const double inv_r = 1.0 / r;
            for (std::size_t col = 0; col < m; ++col) {
                const double phase = (two_pi / lambda) * (up[col] - quad[col] * 0.5 * inv_r);
                out.entries(Eigen::Index(row), Eigen::Index(col)) = std::polar(inv_r, phase);
            }
        });
    }
    if (!out.entries.allFinite())
        throw std::runtime_error("channel matrix has non-finite entries");
    return out;
}

/// Worst third-order Fresnel phase error over the sampled aperture:
/// max_p (2 pi / lambda) |u.p| (|p|^2 - (u.p)^2) / (2 r_min^2).
/// Evaluated over all sampled points rather than only the extreme corner,
/// since for holed or non-convex apertures the maximizer need not be p_max.
inline double max_phase_error(const SampledAperture& aperture, const ReceiveArray& array,
                              double wavelength) {
    if (!(wavelength > 0.0))
        throw std::invalid_argument("wavelength must be positive");
    if (!(array.r_min > 0.0))
        throw std::invalid_argument("receive array requires r_min > 0");
    const double two_pi = 2.0 * std::acos(-1.0);
    const double denom = 2.0 * array.r_min * array.r_min;
    double worst = 0.0;
    for (const auto& p : aperture.points) {
        const double up = array.direction.u.dot(p);
        const double quad = p.squared_norm() - up * up;
        worst = std::max(worst, std::abs(up) * quad);
    }
    return two_pi / wavelength * worst / denom;
}

}  // namespace nfdof
