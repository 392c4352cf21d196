#pragma once

// JSON configuration for the command-line tools: curve specification, grid
// sizes, tolerances, homotopy choice, and the rigid-body block. Parsing
// throws ConfigError with the offending field path.

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include <json.hpp>

#include "liefloq/errors.hpp"
#include "liefloq/euler_apps.hpp"
#include "liefloq/integrator.hpp"
#include "liefloq/phases.hpp"

namespace liefloq {

struct SegmentSpec {
    double t_start = 0.0;
    double t_end = 0.0;
    Vec3 value;
};

struct CurveSpec {
    bool has_fourier = false;
    std::array<std::vector<double>, 3> cos_coeffs{};
    std::array<std::vector<double>, 3> sin_coeffs{};
    bool has_segments = false;
    std::vector<SegmentSpec> segments;
};

struct RigidBodySpec {
    bool present = false;
    Vec3 inertia;
    double orbit_radius = 1.0;
    double theta_max = 0.5;
    std::size_t sample_steps = 4096;
    std::size_t fit_harmonics = 32;
};

struct OutputSpec {
    std::string report = "report.json";
    std::string sweep = "sweep.csv";
    std::string orbits = "orbits.csv";
};

struct AnalysisConfig {
    GroupId group = GroupId::SO3;
    CurveSpec curve;
    double period = kTwoPi;
    std::size_t n_t = 256;
    std::size_t n_s = 256;
    Tolerances tol{};
    HomotopyFamily::Kind homotopy = HomotopyFamily::Kind::LinearScale;
    RigidBodySpec rigid;
    OutputSpec output;
};

namespace cfgdetail {

inline bool is_power_of_two(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

inline const nlohmann::json& require(const nlohmann::json& j, const std::string& key,
                                     const std::string& path) {
    if (!j.contains(key)) throw ConfigError("missing required field", path + key);
    return j.at(key);
}

inline double positive_number(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError("expected a number", path);
    const double v = j.get<double>();
    if (!(v > 0.0)) throw ConfigError("value must be positive", path);
    return v;
}

inline std::vector<double> number_list(const nlohmann::json& j, const std::string& path) {
    if (!j.is_array()) throw ConfigError("expected an array of numbers", path);
    std::vector<double> out;
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError("expected numbers only", path);
        out.push_back(v.get<double>());
    }
    return out;
}

inline Vec3 vec3_of(const nlohmann::json& j, const std::string& path) {
    const auto v = number_list(j, path);
    if (v.size() != 3) throw ConfigError("expected exactly 3 components", path);
    return {v[0], v[1], v[2]};
}

inline std::size_t grid_size(const nlohmann::json& j, const std::string& path) {
    if (!j.is_number_unsigned()) throw ConfigError("expected a positive integer", path);
    const std::size_t n = j.get<std::size_t>();
    if (n < 8 || !is_power_of_two(n))
        throw ConfigError("grid size must be a power of two and at least 8", path);
    return n;
}

}  // namespace cfgdetail

inline AnalysisConfig parse_config(const nlohmann::json& j) {
    using nlohmann::json;
    AnalysisConfig cfg;

    const std::string group = cfgdetail::require(j, "group", "").get<std::string>();
    if (group == "SO3") {
        cfg.group = GroupId::SO3;
    } else if (group == "SL2R") {
        cfg.group = GroupId::SL2R;
    } else {
        throw ConfigError("group must be \"SO3\" or \"SL2R\"", "group");
    }

    if (j.contains("period")) cfg.period = cfgdetail::positive_number(j.at("period"), "period");

    if (j.contains("curve")) {
        const json& c = j.at("curve");
        cfg.curve.has_fourier = c.contains("fourier");
        cfg.curve.has_segments = c.contains("segments");
        if (cfg.curve.has_fourier == cfg.curve.has_segments)
            throw ConfigError("exactly one of \"fourier\" or \"segments\" must be given",
                              "curve");
        if (cfg.curve.has_fourier) {
            const json& f = c.at("fourier");
            const json& cos_j = cfgdetail::require(f, "cos", "curve.fourier.");
            if (!cos_j.is_array() || cos_j.size() != 3)
                throw ConfigError("expected 3 coefficient arrays", "curve.fourier.cos");
            for (int i = 0; i < 3; ++i)
                cfg.curve.cos_coeffs[static_cast<size_t>(i)] =
                    cfgdetail::number_list(cos_j.at(static_cast<size_t>(i)), "curve.fourier.cos");
            if (f.contains("sin")) {
                const json& sin_j = f.at("sin");
                if (!sin_j.is_array() || sin_j.size() != 3)
                    throw ConfigError("expected 3 coefficient arrays", "curve.fourier.sin");
                for (int i = 0; i < 3; ++i)
                    cfg.curve.sin_coeffs[static_cast<size_t>(i)] = cfgdetail::number_list(
                        sin_j.at(static_cast<size_t>(i)), "curve.fourier.sin");
            }
        } else {
            for (std::size_t i = 0; i < c.at("segments").size(); ++i) {
                const json& seg = c.at("segments").at(i);
                const std::string path = "curve.segments[" + std::to_string(i) + "].";
                SegmentSpec sp;
                sp.t_start = cfgdetail::require(seg, "t_start", path).get<double>();
                sp.t_end = cfgdetail::require(seg, "t_end", path).get<double>();
                sp.value = cfgdetail::vec3_of(cfgdetail::require(seg, "value", path),
                                              path + "value");
                cfg.curve.segments.push_back(sp);
            }
            if (cfg.curve.segments.empty())
                throw ConfigError("at least one segment required", "curve.segments");
        }
    }

    if (j.contains("grid")) {
        const json& g = j.at("grid");
        if (g.contains("n_t")) cfg.n_t = cfgdetail::grid_size(g.at("n_t"), "grid.n_t");
        if (g.contains("n_s")) cfg.n_s = cfgdetail::grid_size(g.at("n_s"), "grid.n_s");
    }

    if (j.contains("tolerances")) {
        const json& t = j.at("tolerances");
        auto get = [&](const char* key, double& slot) {
            if (t.contains(key))
                slot = cfgdetail::positive_number(t.at(key), std::string("tolerances.") + key);
        };
        get("drift", cfg.tol.drift);
        get("manifold", cfg.tol.manifold);
        get("splitting", cfg.tol.splitting);
        get("branch_jump", cfg.tol.branch_jump);
        get("periodicity", cfg.tol.periodicity);
    }

    if (j.contains("homotopy")) {
        const std::string h = j.at("homotopy").get<std::string>();
        if (h == "linear") {
            cfg.homotopy = HomotopyFamily::Kind::LinearScale;
        } else if (h == "geodesic") {
            cfg.homotopy = HomotopyFamily::Kind::Geodesic;
        } else {
            throw ConfigError("homotopy must be \"linear\" or \"geodesic\"", "homotopy");
        }
    }

    if (j.contains("rigid_body")) {
        const json& r = j.at("rigid_body");
        cfg.rigid.present = true;
        cfg.rigid.inertia = cfgdetail::vec3_of(
            cfgdetail::require(r, "inertia", "rigid_body."), "rigid_body.inertia");
        if (cfg.rigid.inertia.x <= 0 || cfg.rigid.inertia.y <= 0 || cfg.rigid.inertia.z <= 0)
            throw ConfigError("principal moments must be positive", "rigid_body.inertia");
        cfg.rigid.orbit_radius = cfgdetail::positive_number(
            cfgdetail::require(r, "orbit_radius", "rigid_body."), "rigid_body.orbit_radius");
        cfg.rigid.theta_max = cfgdetail::positive_number(
            cfgdetail::require(r, "theta_max", "rigid_body."), "rigid_body.theta_max");
        if (r.contains("sample_steps"))
            cfg.rigid.sample_steps =
                cfgdetail::grid_size(r.at("sample_steps"), "rigid_body.sample_steps");
        if (r.contains("fit_harmonics"))
            cfg.rigid.fit_harmonics = r.at("fit_harmonics").get<std::size_t>();
    }

    if (j.contains("output")) {
        const json& o = j.at("output");
        if (o.contains("report")) cfg.output.report = o.at("report").get<std::string>();
        if (o.contains("sweep")) cfg.output.sweep = o.at("sweep").get<std::string>();
        if (o.contains("orbits")) cfg.output.orbits = o.at("orbits").get<std::string>();
    }
    return cfg;
}

inline nlohmann::json config_to_json(const AnalysisConfig& cfg) {
    nlohmann::json j;
    j["group"] = group_name(cfg.group);
    j["period"] = cfg.period;
    if (cfg.curve.has_fourier) {
        j["curve"]["fourier"]["cos"] = cfg.curve.cos_coeffs;
        j["curve"]["fourier"]["sin"] = cfg.curve.sin_coeffs;
    } else if (cfg.curve.has_segments) {
        auto& segs = j["curve"]["segments"];
        for (const auto& s : cfg.curve.segments)
            segs.push_back({{"t_start", s.t_start},
                            {"t_end", s.t_end},
                            {"value", {s.value.x, s.value.y, s.value.z}}});
    }
    j["grid"] = {{"n_t", cfg.n_t}, {"n_s", cfg.n_s}};
    j["tolerances"] = {{"drift", cfg.tol.drift},
                       {"manifold", cfg.tol.manifold},
                       {"splitting", cfg.tol.splitting},
                       {"branch_jump", cfg.tol.branch_jump},
                       {"periodicity", cfg.tol.periodicity}};
    j["homotopy"] =
        cfg.homotopy == HomotopyFamily::Kind::LinearScale ? "linear" : "geodesic";
    if (cfg.rigid.present) {
        j["rigid_body"] = {{"inertia",
                            {cfg.rigid.inertia.x, cfg.rigid.inertia.y, cfg.rigid.inertia.z}},
                           {"orbit_radius", cfg.rigid.orbit_radius},
                           {"theta_max", cfg.rigid.theta_max},
                           {"sample_steps", cfg.rigid.sample_steps},
                           {"fit_harmonics", cfg.rigid.fit_harmonics}};
    }
    j["output"] = {{"report", cfg.output.report},
                   {"sweep", cfg.output.sweep},
                   {"orbits", cfg.output.orbits}};
    return j;
}

/// Build the coefficient curve described by the config. Requires a curve
/// block (analyze/sweep runs).
inline PeriodicCurve make_curve(const AnalysisConfig& cfg) {
    if (cfg.curve.has_fourier)
        return PeriodicCurve::fourier(cfg.group, cfg.curve.cos_coeffs, cfg.curve.sin_coeffs,
                                      cfg.period);
    if (cfg.curve.has_segments) {
        std::vector<PeriodicCurve::Segment> segs;
        for (const auto& s : cfg.curve.segments)
            segs.push_back({s.t_start, s.t_end, AlgebraElement(cfg.group, s.value)});
        return PeriodicCurve::piecewise(cfg.group, std::move(segs), cfg.period);
    }
    throw ConfigError("a curve block is required for this command", "curve");
}

/// Apply a KEY=VAL tolerance override (the CLI flag).
inline void apply_tolerance_override(Tolerances& tol, const std::string& spec) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos)
        throw ConfigError("expected KEY=VAL", "tolerance-override");
    const std::string key = spec.substr(0, eq);
    double value = 0.0;
    try {
        value = std::stod(spec.substr(eq + 1));
    } catch (...) {
        throw ConfigError("could not parse the override value", "tolerance-override." + key);
    }
    if (!(value > 0.0))
        throw ConfigError("tolerance must be positive", "tolerance-override." + key);
    if (key == "drift") {
        tol.drift = value;
    } else if (key == "manifold") {
        tol.manifold = value;
    } else if (key == "splitting") {
        tol.splitting = value;
    } else if (key == "branch_jump") {
        tol.branch_jump = value;
    } else if (key == "periodicity") {
        tol.periodicity = value;
    } else {
        throw ConfigError("unknown tolerance key", "tolerance-override." + key);
    }
}

}  // namespace liefloq
