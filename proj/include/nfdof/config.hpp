// SPDX-License-Identifier: Apache-2.0
//
// Experiment configuration: JSON schema, validation with field-named errors,
// and the canonical config hash embedded in every output file.
//
// Lengths in the config are multiples of the wavelength; `wavelength` itself
// is in meters. Parsed values are stored in meters.

#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nfdof/channel.hpp"
#include "nfdof/geometry.hpp"

namespace nfdof {

/// Invalid configuration: the CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& field, const std::string& what)
        : std::runtime_error("config error at " + field + ": " + what), field_path(field) {}
    std::string field_path;
};

struct SweepSpec {
    std::string parameter;  // r_min | gap_offset | hole_fraction | phi
    std::vector<double> values;
};

struct SpectrumSettings {
    double bin_width = 0.05;  // xi units
    double margin = 20.0;     // xi units beyond the band on each side
    double level = 0.5;       // bandwidth threshold fraction
};

struct ExperimentConfig {
    double wavelength = 0.0;  // meters
    double spacing = 0.0;     // meters
    ChannelVariant model = ChannelVariant::Fresnel;
    double epsilon = 0.01;
    ApertureRegion aperture;  // meters
    ReceiveArray array;       // meters
    SpectrumSettings spectrum;
    std::optional<SweepSpec> sweep;
    std::string output_dir = "out";
    std::string config_hash;
    nlohmann::json raw;
};

namespace detail {

inline std::string fnv1a_hex(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

inline double require_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number())
        throw ConfigError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v))
        throw ConfigError(path, "must be finite");
    return v;
}

inline double positive_number(const nlohmann::json& j, const std::string& path) {
    const double v = require_number(j, path);
    if (!(v > 0.0))
        throw ConfigError(path, "must be positive");
    return v;
}

inline Vec2 parse_point(const nlohmann::json& j, const std::string& path, double scale) {
    if (!j.is_array() || j.size() != 2)
        throw ConfigError(path, "expected [x, z]");
    return {require_number(j[0], path + "[0]") * scale,
            require_number(j[1], path + "[1]") * scale};
}

inline Primitive parse_primitive(const nlohmann::json& j, const std::string& path, double lambda) {
    if (!j.is_object())
        throw ConfigError(path, "expected an object");
    const std::string shape = j.value("shape", "");
    const bool subtract = j.value("subtract", false);
    Vec2 center{0.0, 0.0};
    if (j.contains("center")) center = parse_point(j.at("center"), path + ".center", lambda);

    if (shape == "rectangle") {
        const double w = positive_number(j.contains("width") ? j.at("width") : nlohmann::json(),
                                         path + ".width") * lambda;
        const double h = positive_number(j.contains("height") ? j.at("height") : nlohmann::json(),
                                         path + ".height") * lambda;
        return Primitive::rectangle(center, w, h, subtract);
    }
    if (shape == "disk") {
        const double r = positive_number(j.contains("radius") ? j.at("radius") : nlohmann::json(),
                                         path + ".radius") * lambda;
        return Primitive::disk(center, r, subtract);
    }
    if (shape == "annulus") {
        const double a = positive_number(
            j.contains("inner_radius") ? j.at("inner_radius") : nlohmann::json(),
            path + ".inner_radius") * lambda;
        const double b = positive_number(
            j.contains("outer_radius") ? j.at("outer_radius") : nlohmann::json(),
            path + ".outer_radius") * lambda;
        if (!(b > a))
            throw ConfigError(path + ".outer_radius", "must exceed inner_radius");
        return Primitive::annulus(center, a, b, subtract);
    }
    if (shape == "segment") {
        if (subtract)
            throw ConfigError(path + ".subtract", "segments cannot be subtractive");
        if (!j.contains("from") || !j.contains("to"))
            throw ConfigError(path, "segment requires 'from' and 'to'");
        const Vec2 a = parse_point(j.at("from"), path + ".from", lambda);
        const Vec2 b = parse_point(j.at("to"), path + ".to", lambda);
        return Primitive::segment(a, b);
    }
    throw ConfigError(path + ".shape",
                      "unknown shape '" + shape + "' (rectangle|disk|annulus|segment)");
}

inline ApertureRegion parse_aperture(const nlohmann::json& j, double lambda) {
    if (!j.is_object())
        throw ConfigError("aperture", "expected an object");
    ApertureRegion region;
    const bool has_modules = j.contains("modules");
    const bool has_primitives = j.contains("primitives");
    if (has_modules == has_primitives)
        throw ConfigError("aperture", "provide exactly one of 'modules' or 'primitives'");

    auto parse_module = [&](const nlohmann::json& jm, const std::string& path) {
        if (!jm.is_array() || jm.empty())
            throw ConfigError(path, "expected a nonempty array of primitives");
        ApertureModule mod;
        for (std::size_t i = 0; i < jm.size(); ++i)
            mod.primitives.push_back(
                parse_primitive(jm[i], path + "[" + std::to_string(i) + "]", lambda));
        const bool any_additive = std::any_of(mod.primitives.begin(), mod.primitives.end(),
                                              [](const Primitive& p) { return !p.subtractive; });
        if (!any_additive)
            throw ConfigError(path, "module has no additive primitive");
        return mod;
    };

    if (has_primitives) {
        region.modules.push_back(parse_module(j.at("primitives"), "aperture.primitives"));
    } else {
        const auto& jm = j.at("modules");
        if (!jm.is_array() || jm.empty())
            throw ConfigError("aperture.modules", "expected a nonempty array");
        for (std::size_t m = 0; m < jm.size(); ++m) {
            const std::string path = "aperture.modules[" + std::to_string(m) + "]";
            if (!jm[m].is_object() || !jm[m].contains("primitives"))
                throw ConfigError(path, "expected {\"primitives\": [...]}");
            region.modules.push_back(parse_module(jm[m].at("primitives"), path + ".primitives"));
        }
    }
    return region;
}

inline double parse_angle(const nlohmann::json& j, const std::string& rad_key,
                          const std::string& deg_key, double fallback) {
    const bool has_rad = j.contains(rad_key);
    const bool has_deg = j.contains(deg_key);
    if (has_rad && has_deg)
        throw ConfigError("array." + rad_key, "give either " + rad_key + " or " + deg_key);
    if (has_rad) return require_number(j.at(rad_key), "array." + rad_key);
    if (has_deg)
        return require_number(j.at(deg_key), "array." + deg_key) * std::acos(-1.0) / 180.0;
    return fallback;
}

inline ReceiveArray parse_array(const nlohmann::json& j, double lambda) {
    if (!j.is_object())
        throw ConfigError("array", "expected an object");
    ReceiveArray arr;
    const double pi = std::acos(-1.0);
    const double phi = parse_angle(j, "phi", "phi_deg", pi / 2.0);
    const double theta = parse_angle(j, "theta", "theta_deg", 0.0);
    arr.direction = direction_vector(phi, theta);

    if (!j.contains("r_min"))
        throw ConfigError("array.r_min", "required");
    if (!j.contains("r_max"))
        throw ConfigError("array.r_max", "required");
    arr.r_min = positive_number(j.at("r_min"), "array.r_min") * lambda;
    arr.r_max = positive_number(j.at("r_max"), "array.r_max") * lambda;
    if (!(arr.r_max > arr.r_min))
        throw ConfigError("array.r_max", "must exceed r_min");

    if (j.contains("count")) {
        if (!j.at("count").is_number_integer())
            throw ConfigError("array.count", "expected an integer");
        arr.count = j.at("count").get<int>();
    } else {
        arr.count = 256;
    }
    if (arr.count < 2)
        throw ConfigError("array.count", "must be at least 2");

    const std::string mode = j.value("sampling", "inverse_r");
    if (mode == "inverse_r")
        arr.sampling = RadialSampling::UniformInInverseR;
    else if (mode == "uniform_r")
        arr.sampling = RadialSampling::UniformInR;
    else
        throw ConfigError("array.sampling", "expected 'inverse_r' or 'uniform_r'");
    return arr;
}

inline bool is_x_axis_segment(const ApertureModule& m) {
    return m.primitives.size() == 1 && m.primitives.front().kind == ShapeKind::Segment &&
           m.primitives.front().seg_a.z == 0.0 && m.primitives.front().seg_b.z == 0.0;
}

inline void validate_sweep_geometry(const SweepSpec& sweep, const ApertureRegion& region) {
    if (sweep.parameter == "gap_offset") {
        if (region.modules.size() != 2 || !is_x_axis_segment(region.modules[0]) ||
            !is_x_axis_segment(region.modules[1]))
            throw ConfigError("sweep.parameter",
                              "gap_offset sweep requires two x-axis segment modules");
    } else if (sweep.parameter == "hole_fraction") {
        if (region.modules.size() != 1 || !is_x_axis_segment(region.modules[0]))
            throw ConfigError("sweep.parameter",
                              "hole_fraction sweep requires a single centered x-axis segment");
        const auto& s = region.modules[0].primitives.front();
        if (std::abs(s.seg_a.x + s.seg_b.x) > 1e-9 * std::abs(s.seg_b.x - s.seg_a.x))
            throw ConfigError("sweep.parameter",
                              "hole_fraction sweep requires the segment centered at the origin");
    }
}

inline SweepSpec parse_sweep(const nlohmann::json& j, const ApertureRegion& region) {
    if (!j.is_object())
        throw ConfigError("sweep", "expected an object");
    SweepSpec sweep;
    sweep.parameter = j.value("parameter", "");
    if (sweep.parameter != "r_min" && sweep.parameter != "gap_offset" &&
        sweep.parameter != "hole_fraction" && sweep.parameter != "phi")
        throw ConfigError("sweep.parameter",
                          "unknown sweep parameter '" + sweep.parameter +
                              "' (r_min|gap_offset|hole_fraction|phi)");
    if (!j.contains("values") || !j.at("values").is_array() || j.at("values").empty())
        throw ConfigError("sweep.values", "expected a nonempty array of numbers");
    for (std::size_t i = 0; i < j.at("values").size(); ++i) {
        const std::string path = "sweep.values[" + std::to_string(i) + "]";
        const double v = require_number(j.at("values")[i], path);
        if (sweep.parameter == "r_min" && !(v > 0.0))
            throw ConfigError(path, "r_min values must be positive");
        if (sweep.parameter == "gap_offset" && v < 0.0)
            throw ConfigError(path, "gap_offset values must be nonnegative");
        if (sweep.parameter == "hole_fraction" && (v < 0.0 || v >= 1.0))
            throw ConfigError(path, "hole_fraction values must lie in [0, 1)");
        sweep.values.push_back(v);
    }
    validate_sweep_geometry(sweep, region);
    return sweep;
}

}  // namespace detail

namespace detail {

inline ExperimentConfig parse_config_impl(const nlohmann::json& j) {
    if (!j.is_object())
        throw ConfigError("<root>", "expected a JSON object");
    ExperimentConfig cfg;
    cfg.raw = j;
    cfg.config_hash = detail::fnv1a_hex(j.dump());

    if (!j.contains("wavelength"))
        throw ConfigError("wavelength", "required (meters)");
    cfg.wavelength = detail::positive_number(j.at("wavelength"), "wavelength");

    const double spacing_lambda =
        j.contains("spacing") ? detail::positive_number(j.at("spacing"), "spacing") : 0.5;
    cfg.spacing = spacing_lambda * cfg.wavelength;

    const std::string model = j.value("model", "fresnel");
    if (model == "fresnel")
        cfg.model = ChannelVariant::Fresnel;
    else if (model == "exact")
        cfg.model = ChannelVariant::Exact;
    else
        throw ConfigError("model", "expected 'exact' or 'fresnel'");

    if (j.contains("epsilon")) {
        cfg.epsilon = detail::require_number(j.at("epsilon"), "epsilon");
        if (!(cfg.epsilon > 0.0) || !(cfg.epsilon < 1.0))
            throw ConfigError("epsilon", "must lie in (0, 1)");
    }

    if (!j.contains("aperture"))
        throw ConfigError("aperture", "required");
    cfg.aperture = detail::parse_aperture(j.at("aperture"), cfg.wavelength);
    if (!j.contains("array"))
        throw ConfigError("array", "required");
    cfg.array = detail::parse_array(j.at("array"), cfg.wavelength);

    if (j.contains("spectrum")) {
        const auto& js = j.at("spectrum");
        if (!js.is_object())
            throw ConfigError("spectrum", "expected an object");
        if (js.contains("bin_width"))
            cfg.spectrum.bin_width = detail::positive_number(js.at("bin_width"), "spectrum.bin_width");
        if (js.contains("margin")) {
            cfg.spectrum.margin = detail::require_number(js.at("margin"), "spectrum.margin");
            if (cfg.spectrum.margin < 10.0)
                throw ConfigError("spectrum.margin", "must be at least 10 xi units");
        }
        if (js.contains("level")) {
            cfg.spectrum.level = detail::require_number(js.at("level"), "spectrum.level");
            if (!(cfg.spectrum.level > 0.0) || !(cfg.spectrum.level < 1.0))
                throw ConfigError("spectrum.level", "must lie in (0, 1)");
        }
    }

    if (j.contains("sweep"))
        cfg.sweep = detail::parse_sweep(j.at("sweep"), cfg.aperture);

    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string())
            throw ConfigError("output_dir", "expected a string");
        cfg.output_dir = j.at("output_dir").get<std::string>();
    }
    return cfg;
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    try {
        return detail::parse_config_impl(j);
    } catch (const ConfigError&) {
        throw;
    } catch (const nlohmann::json::exception& e) {
        // wrong-typed fields surface as schema errors, not numerical failures
        throw ConfigError("<schema>", e.what());
    }
}

/// Loads and validates a config file. JSON syntax errors are reported with
/// the line number; schema violations name the offending field.
inline ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("<file>", "cannot open '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        std::size_t line = 1;
        const std::size_t upto = std::min(text.size(), e.byte);
        for (std::size_t i = 0; i < upto; ++i)
            if (text[i] == '\n') ++line;
        throw ConfigError("<syntax>", "line " + std::to_string(line) + ": " + e.what());
    }
    return parse_config(j);
}

}  // namespace nfdof
