// SPDX-License-Identifier: Apache-2.0
//
// Spectral analysis of the channel correlation operator: receive-side Gram
// eigenvalues, the inverse-distance (t = 1/r) kernel transformation that
// exposes the Hermitian convolution structure, and the scaled Fourier
// spectrum g~(xi) = g0~(xi) * sinc(2 xi) whose band predicts the DoF.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "nfdof/channel.hpp"
#include "nfdof/geometry.hpp"

namespace nfdof {

/// Eigenvalues of the discretized correlation operator, descending, clamped
/// to be nonnegative. normalization holds the largest value.
struct EigenSpectrum {
    std::vector<double> values;
    double normalization = 0.0;
};

/// The t = 1/r interval [t_min, t_max] with T = t_max - t_min.
struct InverseDistanceGrid {
    double t_min = 0.0;
    double t_max = 0.0;
    double T = 0.0;
    std::vector<double> t_values;
};

/// Convolution kernel g sampled on a t grid, with the quadrature weights the
/// eigen-solve should apply in the t domain.
struct TDomainOperator {
    Eigen::MatrixXcd kernel;
    InverseDistanceGrid grid;
    std::vector<double> t_weights;
};

/// Sampled scaled spectrum. g0_values is the density of g0~ on a uniform xi
/// grid (bin centers); g_values is filled by convolve_sinc. omega is the
/// support interval of the sampled cloud's xi images.
struct SpectrumProfile {
    std::vector<double> xi_grid;
    std::vector<double> g0_values;
    std::vector<double> g_values;
    double omega_lo = 0.0;
    double omega_hi = 0.0;
    double bin_width = 0.0;
    bool has_g = false;
};

namespace detail {

inline double sinc(double x) {
    const double pi = std::acos(-1.0);
    if (std::abs(x) < 1e-10) {
        const double px = pi * x;
        return 1.0 - px * px / 6.0;
    }
    return std::sin(pi * x) / (pi * x);
}

inline Eigen::VectorXd sorted_descending_clamped(Eigen::VectorXd v) {
    std::sort(v.data(), v.data() + v.size(), std::greater<double>());
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = std::max(0.0, v[i]);
    return v;
}

}  // namespace detail

/// Eigenvalues of D^{1/2} (H W H^H) D^{1/2}, with W the aperture quadrature
/// and D the receive radial quadrature. For samples placed uniformly in
/// t = 1/r this matrix equals the dt-weighted convolution-kernel operator,
/// so its spectrum is the discrete Szego object.
inline EigenSpectrum gram_eigenvalues(const ChannelMatrix& H) {
    const Eigen::Index k = H.rx_count();
    if (k < 1)
        throw std::invalid_argument("gram_eigenvalues: empty channel matrix");
    if (!H.entries.allFinite())
        throw std::runtime_error("gram_eigenvalues: non-finite entries");

    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(H.tx_weights.data(),
                                                          Eigen::Index(H.tx_weights.size()));
    Eigen::VectorXd d = Eigen::Map<const Eigen::VectorXd>(H.rx_r_weights.data(),
                                                          Eigen::Index(H.rx_r_weights.size()));
    Eigen::MatrixXcd g = H.entries * w.asDiagonal() * H.entries.adjoint();
    Eigen::VectorXd sq = d.array().sqrt();
    Eigen::MatrixXcd a = sq.asDiagonal() * g * sq.asDiagonal();

    const double asym = (a - a.adjoint()).cwiseAbs().maxCoeff();
    Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("gram_eigenvalues: eigendecomposition failed");

    EigenSpectrum out;
    Eigen::VectorXd ev = detail::sorted_descending_clamped(solver.eigenvalues());
    out.values.assign(ev.data(), ev.data() + ev.size());
    out.normalization = out.values.empty() ? 0.0 : out.values.front();
    if (out.normalization > 0.0 && asym > 1e-10 * out.normalization)
        throw std::runtime_error("gram_eigenvalues: Gram matrix is not Hermitian to tolerance");
    return out;
}

/// g(dt) = sum_m w_m exp(-j (pi / lambda) |p_m|^2 dt), the quadrature form of
/// the convolution kernel. Depends on the aperture only through |p|, so it
/// serves projected clouds unchanged.
inline std::complex<double> convolution_kernel_g(const SampledAperture& aperture, double delta_t,
                                                 double wavelength) {
    const double pi = std::acos(-1.0);
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t m = 0; m < aperture.size(); ++m) {
        const double phase = -pi / wavelength * aperture.points[m].squared_norm() * delta_t;
        acc += aperture.weights[m] * std::polar(1.0, phase);
    }
    return acc;
}

/// Windowed kernel: zero outside |dt| <= T.
inline std::complex<double> windowed_kernel_g(const SampledAperture& aperture, double delta_t,
                                              double wavelength, double T) {
    if (std::abs(delta_t) > T) return {0.0, 0.0};
    return convolution_kernel_g(aperture, delta_t, wavelength);
}

/// Builds the convolution-kernel operator on a uniform t grid with the same
/// span and sample count as the array. The kernel matrix is Toeplitz and
/// Hermitian by construction; with the returned t weights its eigenvalues
/// match those of the r-domain operator under the dr = dt/t^2 quadrature.
inline TDomainOperator transform_to_inverse_distance(const SampledAperture& aperture,
                                                     const ReceiveArray& array,
                                                     double wavelength) {
    if (!(array.r_min > 0.0) || !(array.r_max > array.r_min))
        throw std::invalid_argument("receive array requires 0 < r_min < r_max");
    const int n = array.count;
    if (n < 2)
        throw std::invalid_argument("receive array requires count >= 2");

    TDomainOperator out;
    out.grid.t_min = 1.0 / array.r_max;
    out.grid.t_max = 1.0 / array.r_min;
    out.grid.T = out.grid.t_max - out.grid.t_min;
    const double dt = out.grid.T / double(n - 1);
    out.grid.t_values.resize(n);
    out.t_weights.resize(n);
    for (int i = 0; i < n; ++i) {
        out.grid.t_values[i] = (i == n - 1) ? out.grid.t_max : out.grid.t_min + dt * i;
        out.t_weights[i] = dt * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
    }
    std::vector<std::complex<double>> lags(n);
    detail::parallel_for(std::size_t(n), [&](std::size_t i) {
        lags[i] = convolution_kernel_g(aperture, double(i) * dt, wavelength);
    });
    out.kernel.resize(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.kernel(i, j) = (i >= j) ? lags[i - j] : std::conj(lags[j - i]);
    return out;
}

/// Same operator obtained from an assembled channel matrix:
/// g(t_k, t_k') = (1/(t_k t_k')) v(r_k, r_k') with v = H W H^H.
inline TDomainOperator transform_to_inverse_distance(const ChannelMatrix& H) {
    const Eigen::Index k = H.rx_count();
    if (k < 1)
        throw std::invalid_argument("transform_to_inverse_distance: empty channel matrix");
    Eigen::VectorXd w = Eigen::Map<const Eigen::VectorXd>(H.tx_weights.data(),
                                                          Eigen::Index(H.tx_weights.size()));
    TDomainOperator out;
    out.kernel = H.entries * w.asDiagonal() * H.entries.adjoint();
    out.grid.t_values = H.rx_t_values;
    const auto [lo, hi] = std::minmax_element(H.rx_t_values.begin(), H.rx_t_values.end());
    out.grid.t_min = *lo;
    out.grid.t_max = *hi;
    out.grid.T = *hi - *lo;
    out.t_weights = H.rx_t_weights;
    for (Eigen::Index i = 0; i < k; ++i)
        for (Eigen::Index j = 0; j < k; ++j)
            out.kernel(i, j) /= H.rx_t_values[std::size_t(i)] * H.rx_t_values[std::size_t(j)];
    return out;
}

/// Eigenvalues of the t-domain operator under its quadrature weights.
inline EigenSpectrum kernel_eigenvalues(const TDomainOperator& op) {
    Eigen::VectorXd tau = Eigen::Map<const Eigen::VectorXd>(op.t_weights.data(),
                                                            Eigen::Index(op.t_weights.size()));
    Eigen::VectorXd sq = tau.array().sqrt();
    Eigen::MatrixXcd a = sq.asDiagonal() * op.kernel * sq.asDiagonal();
    Eigen::MatrixXcd herm = 0.5 * (a + a.adjoint());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(herm, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("kernel_eigenvalues: eigendecomposition failed");
    EigenSpectrum out;
    Eigen::VectorXd ev = detail::sorted_descending_clamped(solver.eigenvalues());
    out.values.assign(ev.data(), ev.data() + ev.size());
    out.normalization = out.values.empty() ? 0.0 : out.values.front();
    return out;
}

/// Uniform xi grid description for the spectrum histogram.
struct XiGrid {
    double lo = 0.0;
    double bin_width = 0.05;
    int bins = 0;
};

/// Default grid: the cloud's xi support padded by `margin` on both sides.
inline XiGrid default_xi_grid(const SampledAperture& aperture, const ReceiveArray& array,
                              double wavelength, double bin_width = 0.05, double margin = 20.0) {
    const double T = 1.0 / array.r_min - 1.0 / array.r_max;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (const auto& p : aperture.points) {
        const double xi = -p.squared_norm() * T / (2.0 * wavelength);
        lo = std::min(lo, xi);
        hi = std::max(hi, xi);
    }
    XiGrid g;
    g.bin_width = bin_width;
    g.lo = lo - margin;
    g.bins = int(std::ceil((hi + margin - g.lo) / bin_width)) + 1;
    return g;
}

/// Weighted histogram of the Dirac images xi_p = -|p|^2 T / (2 lambda),
/// normalized to a density on the grid. Mass falling outside the grid is
/// dropped (a disjoint grid yields an all-zero profile).
inline SpectrumProfile g0_spectrum(const SampledAperture& aperture, const ReceiveArray& array,
                                   double wavelength, const XiGrid& grid) {
    if (grid.bins <= 0 || !(grid.bin_width > 0.0))
        throw std::invalid_argument("g0_spectrum: xi grid must be uniform and nonempty");
    const double T = 1.0 / array.r_min - 1.0 / array.r_max;

    SpectrumProfile out;
    out.bin_width = grid.bin_width;
    out.xi_grid.resize(grid.bins);
    out.g0_values.assign(grid.bins, 0.0);
    for (int i = 0; i < grid.bins; ++i)
        out.xi_grid[i] = grid.lo + (double(i) + 0.5) * grid.bin_width;

    double olo = std::numeric_limits<double>::infinity();
    double ohi = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < aperture.size(); ++m) {
        const double xi = -aperture.points[m].squared_norm() * T / (2.0 * wavelength);
        olo = std::min(olo, xi);
        ohi = std::max(ohi, xi);
        const double f = (xi - grid.lo) / grid.bin_width;
        if (f < 0.0 || f >= double(grid.bins)) continue;
        out.g0_values[std::size_t(f)] += aperture.weights[m] / grid.bin_width;
    }
    out.omega_lo = olo;
    out.omega_hi = ohi;
    return out;
}

inline SpectrumProfile g0_spectrum(const SampledAperture& aperture, const ReceiveArray& array,
                                   double wavelength) {
    return g0_spectrum(aperture, array, wavelength,
                       default_xi_grid(aperture, array, wavelength));
}

enum class ConvolutionPath { Auto, Direct, Fast };

namespace detail {

inline std::vector<double> convolve_direct(const std::vector<double>& xi,
                                           const std::vector<double>& a) {
    const std::size_t n = xi.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < n; ++j) acc += a[j] * sinc(2.0 * (xi[i] - xi[j]));
        out[i] = acc;
    }
    return out;
}

inline std::vector<double> convolve_fft(const std::vector<double>& a, double bin_width) {
    const std::size_t n = a.size();
    const std::size_t klen = 2 * n - 1;  // sinc taps, lag -(n-1)..(n-1)
    std::size_t len = 1;
    while (len < n + klen - 1) len <<= 1;

    std::vector<std::complex<double>> fa(len, 0.0), fk(len, 0.0);
    for (std::size_t i = 0; i < n; ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < klen; ++i) {
        const double lag = (double(i) - double(n - 1)) * bin_width;
        fk[i] = sinc(2.0 * lag);
    }
    Eigen::FFT<double> fft;
    std::vector<std::complex<double>> Fa(len), Fk(len);
    fft.fwd(Fa, fa);
    fft.fwd(Fk, fk);
    for (std::size_t i = 0; i < len; ++i) Fa[i] *= Fk[i];
    std::vector<std::complex<double>> conv(len);
    fft.inv(conv, Fa);

    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = conv[i + n - 1].real();
    return out;
}

}  // namespace detail

/// g~(xi) = g0~(xi) * sinc(2 xi), sampled on the profile grid. Trapezoidal
/// quadrature over the grid; direct summation below 4096 bins, FFT-based
/// linear convolution above (ConvolutionPath overrides the choice).
inline SpectrumProfile convolve_sinc(SpectrumProfile profile,
                                     ConvolutionPath path = ConvolutionPath::Auto,
                                     double required_margin = 10.0) {
    const std::size_t n = profile.xi_grid.size();
    if (n == 0)
        throw std::invalid_argument("convolve_sinc: empty profile");
    const double grid_lo = profile.xi_grid.front() - profile.bin_width / 2.0;
    const double grid_hi = profile.xi_grid.back() + profile.bin_width / 2.0;
    if (profile.omega_lo - grid_lo < required_margin || grid_hi - profile.omega_hi < required_margin)
        throw std::invalid_argument("convolve_sinc: insufficient grid margin around the band");

    std::vector<double> a(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double trap = (j == 0 || j == n - 1) ? 0.5 : 1.0;
        a[j] = profile.g0_values[j] * profile.bin_width * trap;
    }
    const bool fast = (path == ConvolutionPath::Fast) ||
                      (path == ConvolutionPath::Auto && n >= 4096);
    profile.g_values = fast ? detail::convolve_fft(a, profile.bin_width)
                            : detail::convolve_direct(profile.xi_grid, a);
    for (double v : profile.g_values)
        if (!std::isfinite(v)) throw std::runtime_error("convolve_sinc: non-finite spectrum");
    profile.has_g = true;
    return profile;
}

/// Lebesgue measure (sum of bin widths) of {xi : |g~(xi)| >= level * max|g~|}.
inline double measured_bandwidth(const SpectrumProfile& profile, double level) {
    if (!profile.has_g)
        throw std::invalid_argument("measured_bandwidth: spectrum not convolved");
    if (!(level > 0.0) || !(level < 1.0))
        throw std::invalid_argument("measured_bandwidth: level must be in (0, 1)");
    double peak = 0.0;
    for (double v : profile.g_values) peak = std::max(peak, std::abs(v));
    if (peak <= 0.0)
        throw std::invalid_argument("measured_bandwidth: all-zero profile");
    std::size_t count = 0;
    for (double v : profile.g_values)
        if (std::abs(v) >= level * peak) ++count;
    return double(count) * profile.bin_width;
}

}  // namespace nfdof
