// SPDX-License-Identifier: Apache-2.0
//
// Experiment runner behind the CLI subcommands: eig, spectrum and sweep
// pipelines with deterministic CSV/JSON outputs. Every output file embeds
// the config hash; numbers are printed with 17 significant digits.

#pragma once

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nfdof/channel.hpp"
#include "nfdof/config.hpp"
#include "nfdof/dof.hpp"
#include "nfdof/geometry.hpp"
#include "nfdof/spectral.hpp"

namespace nfdof {

struct ResultBundle {
    std::string eigen_csv;
    std::string spectrum_csv;
    std::string sweep_csv;
    std::string prediction_json;
    std::string metadata_json;
    DofPrediction prediction;
    DominantCount dominant;
    double bandwidth = 0.0;
    std::size_t tx_samples = 0;
    std::size_t rx_samples = 0;
    double runtime_ms = 0.0;
};

namespace detail {

inline std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path + "'");
    out << text;
}

inline nlohmann::json prediction_to_json(const DofPrediction& p) {
    nlohmann::json intervals = nlohmann::json::array();
    for (const auto& iv : p.omega_intervals)
        intervals.push_back({iv.lo, iv.hi});
    return {{"formula", p.formula}, {"value", p.value}, {"intervals", intervals}};
}

inline double elapsed_ms(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
}

}  // namespace detail

inline void write_eigen_csv(const std::string& path, const EigenSpectrum& spectrum,
                            const std::string& config_hash) {
    std::string text = "# config_hash=" + config_hash + "\nindex,eigenvalue,normalized\n";
    const double top = spectrum.normalization > 0.0 ? spectrum.normalization : 1.0;
    for (std::size_t i = 0; i < spectrum.values.size(); ++i) {
        text += std::to_string(i + 1);
        text += ',';
        text += detail::fmt17(spectrum.values[i]);
        text += ',';
        text += detail::fmt17(spectrum.values[i] / top);
        text += '\n';
    }
    detail::write_text(path, text);
}

/// Debug dump of a channel matrix: dimension header, then row-major rows
/// with interleaved re,im cells.
inline void write_channel_csv(const std::string& path, const ChannelMatrix& H,
                              const std::string& config_hash) {
    std::string text = "# config_hash=" + config_hash + "\nrows,cols\n" +
                       std::to_string(H.rx_count()) + "," + std::to_string(H.tx_count()) + "\n";
    for (Eigen::Index k = 0; k < H.rx_count(); ++k) {
        for (Eigen::Index m = 0; m < H.tx_count(); ++m) {
            if (m) text += ',';
            text += detail::fmt17(H.entries(k, m).real());
            text += ',';
            text += detail::fmt17(H.entries(k, m).imag());
        }
        text += '\n';
    }
    detail::write_text(path, text);
}

inline void write_spectrum_csv(const std::string& path, const SpectrumProfile& profile,
                               const std::string& config_hash) {
    std::string text = "# config_hash=" + config_hash + "\nxi,g0,g_real,g_imag\n";
    for (std::size_t i = 0; i < profile.xi_grid.size(); ++i) {
        text += detail::fmt17(profile.xi_grid[i]);
        text += ',';
        text += detail::fmt17(profile.g0_values[i]);
        text += ',';
        text += detail::fmt17(profile.has_g ? profile.g_values[i] : 0.0);
        text += ",0\n";
    }
    detail::write_text(path, text);
}

namespace detail {

inline nlohmann::json base_params(const ExperimentConfig& cfg) {
    const double lam = cfg.wavelength;
    return {{"wavelength", cfg.wavelength},
            {"spacing_lambda", cfg.spacing / lam},
            {"r_min_lambda", cfg.array.r_min / lam},
            {"r_max_lambda", cfg.array.r_max / lam},
            {"rx_count", cfg.array.count},
            {"phi", cfg.array.direction.phi},
            {"theta", cfg.array.direction.theta},
            {"model", cfg.model == ChannelVariant::Exact ? "exact" : "fresnel"},
            {"epsilon", cfg.epsilon}};
}

inline void write_metadata(const ExperimentConfig& cfg, const std::string& subcommand,
                           ResultBundle& bundle, const std::string& dir) {
    nlohmann::json meta = {{"config_hash", cfg.config_hash},
                           {"subcommand", subcommand},
                           {"runtime_ms", bundle.runtime_ms},
                           {"tx_samples", bundle.tx_samples},
                           {"rx_samples", bundle.rx_samples}};
    bundle.metadata_json = dir + "/metadata.json";
    write_text(bundle.metadata_json, meta.dump(2) + "\n");
}

inline std::string ensure_output_dir(const ExperimentConfig& cfg) {
    std::filesystem::create_directories(cfg.output_dir);
    return cfg.output_dir;
}

struct EigOutcome {
    EigenSpectrum spectrum;
    DominantCount dominant;
    DofPrediction prediction;
    std::size_t tx_samples = 0;
    std::size_t rx_samples = 0;
};

inline EigOutcome eig_pipeline(const ExperimentConfig& cfg,
                               const std::string& dump_h_path = "") {
    EigOutcome out;
    const SampledAperture aperture = sample_aperture(cfg.aperture, cfg.spacing);
    const ReceiveSamples rx = sample_receive_array(cfg.array);
    const ChannelMatrix H =
        build_channel_matrix(aperture, rx, ChannelModel{cfg.model, cfg.wavelength});
    if (!dump_h_path.empty()) write_channel_csv(dump_h_path, H, cfg.config_hash);
    out.spectrum = gram_eigenvalues(H);
    out.dominant = count_dominant(out.spectrum, cfg.epsilon);
    out.prediction = predict_dof(cfg.aperture, cfg.array.direction, cfg.array.r_min,
                                 cfg.array.r_max, cfg.wavelength);
    out.tx_samples = aperture.size();
    out.rx_samples = rx.radii.size();
    return out;
}

}  // namespace detail

/// Pipeline: sample -> channel -> Gram eigenvalues -> dominant count, with
/// the matching closed-form prediction. A nonempty dump_h_path additionally
/// writes the assembled channel matrix for debugging.
inline ResultBundle run_eig(const ExperimentConfig& cfg, const std::string& dump_h_path = "") {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string dir = detail::ensure_output_dir(cfg);

    detail::EigOutcome eig = detail::eig_pipeline(cfg, dump_h_path);

    ResultBundle bundle;
    bundle.prediction = eig.prediction;
    bundle.dominant = eig.dominant;
    bundle.tx_samples = eig.tx_samples;
    bundle.rx_samples = eig.rx_samples;

    bundle.eigen_csv = dir + "/eigen.csv";
    write_eigen_csv(bundle.eigen_csv, eig.spectrum, cfg.config_hash);

    nlohmann::json pred = detail::prediction_to_json(eig.prediction);
    pred["config_hash"] = cfg.config_hash;
    pred["params"] = detail::base_params(cfg);
    pred["dominant_count"] = {{"count", eig.dominant.count},
                              {"epsilon", eig.dominant.epsilon},
                              {"count_at_low_epsilon", eig.dominant.count_low_eps},
                              {"count_at_high_epsilon", eig.dominant.count_high_eps}};
    bundle.prediction_json = dir + "/prediction.json";
    detail::write_text(bundle.prediction_json, pred.dump(2) + "\n");

    bundle.runtime_ms = detail::elapsed_ms(t0);
    detail::write_metadata(cfg, "eig", bundle, dir);
    return bundle;
}

/// Pipeline: g0 histogram -> sinc convolution -> bandwidth measurement.
/// Non-broadside directions are projected onto the orthogonal plane first.
inline ResultBundle run_spectrum(const ExperimentConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::string dir = detail::ensure_output_dir(cfg);

    SampledAperture cloud = sample_aperture(cfg.aperture, cfg.spacing);
    if (!cfg.array.direction.is_broadside())
        cloud = project_aperture(cloud, cfg.array.direction);

    const XiGrid grid = default_xi_grid(cloud, cfg.array, cfg.wavelength,
                                        cfg.spectrum.bin_width, cfg.spectrum.margin);
    SpectrumProfile profile = g0_spectrum(cloud, cfg.array, cfg.wavelength, grid);
    profile = convolve_sinc(profile);
    const double bw = measured_bandwidth(profile, cfg.spectrum.level);

    ResultBundle bundle;
    bundle.tx_samples = cloud.size();
    bundle.rx_samples = std::size_t(cfg.array.count);
    bundle.bandwidth = bw;
    bundle.prediction = predict_dof(cfg.aperture, cfg.array.direction, cfg.array.r_min,
                                    cfg.array.r_max, cfg.wavelength);

    bundle.spectrum_csv = dir + "/spectrum.csv";
    write_spectrum_csv(bundle.spectrum_csv, profile, cfg.config_hash);

    nlohmann::json pred = detail::prediction_to_json(bundle.prediction);
    pred["config_hash"] = cfg.config_hash;
    pred["params"] = detail::base_params(cfg);
    pred["spectrum"] = {{"measured_bandwidth", bw},
                        {"level", cfg.spectrum.level},
                        {"omega_analytic",
                         {bundle.prediction.omega_intervals.front().lo,
                          bundle.prediction.omega_intervals.back().hi}},
                        {"omega_sampled", {profile.omega_lo, profile.omega_hi}}};
    bundle.prediction_json = dir + "/prediction.json";
    detail::write_text(bundle.prediction_json, pred.dump(2) + "\n");

    bundle.runtime_ms = detail::elapsed_ms(t0);
    detail::write_metadata(cfg, "spectrum", bundle, dir);
    return bundle;
}

namespace detail {

/// A sweep point is the base config with one parameter substituted.
inline ExperimentConfig sweep_point(const ExperimentConfig& base, const std::string& parameter,
                                    double value) {
    ExperimentConfig cfg = base;
    cfg.sweep.reset();
    const double lam = cfg.wavelength;
    if (parameter == "r_min") {
        const double span = base.array.r_max - base.array.r_min;
        cfg.array.r_min = value * lam;
        cfg.array.r_max = value * lam + span;
    } else if (parameter == "phi") {
        cfg.array.direction = direction_vector(value, base.array.direction.theta);
    } else if (parameter == "gap_offset") {
        const auto& seg = base.aperture.modules[0].primitives.front();
        const double len = std::abs(seg.seg_b.x - seg.seg_a.x);
        const double a = value * lam;
        cfg.aperture.modules.clear();
        cfg.aperture.modules.push_back(
            ApertureModule{{Primitive::segment({a, 0.0}, {a + len, 0.0})}});
        cfg.aperture.modules.push_back(
            ApertureModule{{Primitive::segment({-a - len, 0.0}, {-a, 0.0})}});
    } else if (parameter == "hole_fraction") {
        const auto& seg = base.aperture.modules[0].primitives.front();
        const double L = std::max(std::abs(seg.seg_a.x), std::abs(seg.seg_b.x));
        cfg.aperture.modules.clear();
        if (value <= 0.0) {
            cfg.aperture.modules.push_back(
                ApertureModule{{Primitive::segment({-L, 0.0}, {L, 0.0})}});
        } else {
            cfg.aperture.modules.push_back(
                ApertureModule{{Primitive::segment({value * L, 0.0}, {L, 0.0})}});
            cfg.aperture.modules.push_back(
                ApertureModule{{Primitive::segment({-L, 0.0}, {-value * L, 0.0})}});
        }
    } else {
        throw ConfigError("sweep.parameter", "unknown sweep parameter '" + parameter + "'");
    }
    return cfg;
}

}  // namespace detail

/// One eig run per sweep value; rows (param, prediction, dominant_count,
/// runtime_ms) in sweep order. The runtime column is wall-clock and is the
/// only nondeterministic output column.
inline ResultBundle run_sweep(const ExperimentConfig& cfg) {
    if (!cfg.sweep)
        throw ConfigError("sweep", "required for the sweep subcommand");
    const auto t0 = std::chrono::steady_clock::now();
    const std::string dir = detail::ensure_output_dir(cfg);

    std::string csv = "# config_hash=" + cfg.config_hash +
                      "\nparam,prediction,dominant_count,runtime_ms\n";
    ResultBundle bundle;
    for (double value : cfg.sweep->values) {
        const auto p0 = std::chrono::steady_clock::now();
        const ExperimentConfig point = detail::sweep_point(cfg, cfg.sweep->parameter, value);
        const detail::EigOutcome eig = detail::eig_pipeline(point);
        const double ms = detail::elapsed_ms(p0);
        csv += detail::fmt17(value);
        csv += ',';
        csv += detail::fmt17(eig.prediction.value);
        csv += ',';
        csv += std::to_string(eig.dominant.count);
        csv += ',';
        csv += detail::fmt17(ms);
        csv += '\n';
        bundle.prediction = eig.prediction;
        bundle.dominant = eig.dominant;
        bundle.tx_samples += eig.tx_samples;
        bundle.rx_samples = eig.rx_samples;
    }
    bundle.sweep_csv = dir + "/sweep.csv";
    detail::write_text(bundle.sweep_csv, csv);
    bundle.runtime_ms = detail::elapsed_ms(t0);
    detail::write_metadata(cfg, "sweep", bundle, dir);
    return bundle;
}

}  // namespace nfdof
