#pragma once

// Report document assembly and CSV emission. All numeric output is printed
// with %.17g and no timestamps are recorded, so identical runs produce
// byte-identical files.

#include <cstdio>
#include <string>

#include <json.hpp>

#include "liefloq/config.hpp"
#include "liefloq/euler_apps.hpp"
#include "liefloq/phases.hpp"
#include "liefloq/version.hpp"

namespace liefloq {

inline std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace repdetail {

inline nlohmann::json vec_json(const Vec3& v) {
    return nlohmann::json{v.x, v.y, v.z};
}

inline nlohmann::json matrix_json(const Mat& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < m.dim(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (int j = 0; j < m.dim(); ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

inline nlohmann::json monodromy_json(const MonodromyReport& mr) {
    nlohmann::json j;
    j["matrix"] = matrix_json(mr.m.matrix);
    j["trace"] = mr.m.matrix.trace();
    j["log_status"] = log_status_name(mr.log.status);
    j["log_principal"] = vec_json(mr.log.principal.coords);
    j["branch_rule"] = mr.log.branch_rule;
    j["reducible"] = mr.reducible;
    j["adjoint_reducible"] = mr.adjoint_reducible;
    j["adjoint_log_coords"] = vec_json(mr.adjoint_log_coords);
    if (mr.log.has_center_factor)
        j["center_factor"] = matrix_json(mr.log.center_factor.matrix);
    return j;
}

}  // namespace repdetail

inline nlohmann::json provenance_json(const AnalysisConfig& cfg) {
    return nlohmann::json{{"tool", "liefloq"},
                          {"version", kVersion},
                          {"grid", {{"n_t", cfg.n_t}, {"n_s", cfg.n_s}}}};
}

/// Full analysis report: echoed config, monodromy classification, phase
/// split with residuals, and the per-s sweep table.
inline nlohmann::json report_document(const AnalysisConfig& cfg, const PhaseReport& rep) {
    nlohmann::json j;
    j["config"] = config_to_json(cfg);
    j["provenance"] = provenance_json(cfg);
    j["provenance"]["branch_rule"] = rep.branch_rule;
    j["monodromy"] = repdetail::monodromy_json(rep.end_monodromy);

    nlohmann::json ph;
    ph["k"] = repdetail::vec_json(rep.k.coords);
    ph["k_dyn"] = repdetail::vec_json(rep.k_dyn.coords);
    ph["k_geom"] = repdetail::vec_json(rep.k_geom.coords);
    ph["splitting_residual"] = rep.splitting_residual;
    ph["splitting_residual_max"] = rep.splitting_residual_max;
    ph["curvature_residual"] = rep.curvature_residual;
    ph["periodicity_residual"] = rep.periodicity_residual;
    ph["surface_check"] = repdetail::vec_json(rep.surface_check);
    ph["homotopy_kind"] = homotopy_kind_name(rep.homotopy_kind);
    j["phases"] = ph;

    nlohmann::json sweep = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.s_grid.size(); ++i) {
        sweep.push_back({{"s", rep.s_grid[i]},
                         {"k", repdetail::vec_json(rep.k_of_s[i].coords)},
                         {"k_dyn", repdetail::vec_json(rep.k_dyn_of_s[i].coords)},
                         {"k_geom", repdetail::vec_json(rep.k_geom_of_s[i].coords)},
                         {"splitting_residual", rep.splitting_of_s[i]}});
    }
    j["sweep"] = sweep;
    return j;
}

inline const char* kSweepCsvHeader =
    "s,k_1,k_2,k_3,k_dyn_1,k_dyn_2,k_dyn_3,k_geom_1,k_geom_2,k_geom_3,"
    "splitting_residual";

/// One CSV row per s node with the fixed, documented column order.
inline std::string sweep_csv(const PhaseReport& rep) {
    std::string out = kSweepCsvHeader;
    out += '\n';
    for (std::size_t i = 0; i < rep.s_grid.size(); ++i) {
        out += fmt_double(rep.s_grid[i]);
        const Vec3* cols[3] = {&rep.k_of_s[i].coords, &rep.k_dyn_of_s[i].coords,
                               &rep.k_geom_of_s[i].coords};
        for (const Vec3* v : cols)
            for (int c = 0; c < 3; ++c) {
                out += ',';
                out += fmt_double((*v)[c]);
            }
        out += ',';
        out += fmt_double(rep.splitting_of_s[i]);
        out += '\n';
    }
    return out;
}

/// Rigid-body report: phases plus the reconstruction identities per s node.
inline nlohmann::json rigidbody_document(const AnalysisConfig& cfg,
                                         const RigidBodyFamily& fam,
                                         const ReconstructionResult& rr) {
    nlohmann::json j;
    j["config"] = config_to_json(cfg);
    j["provenance"] = provenance_json(cfg);
    j["provenance"]["base_point_rule"] =
        "polar angle s*theta_max from the stable axis, tilted toward the middle-moment axis";
    j["family"] = {{"inertia", repdetail::vec_json(fam.inertia)},
                   {"orbit_radius", fam.orbit_radius},
                   {"theta_max", fam.theta_max},
                   {"stable_axis", fam.stable_axis},
                   {"degenerate", fam.degenerate},
                   {"omega_linear", fam.omega_linear}};
    if (!fam.degenerate) {
        j["provenance"]["branch_rule"] = rr.report.branch_rule;
        j["phases"] = {{"k", repdetail::vec_json(rr.report.k.coords)},
                       {"k_dyn", repdetail::vec_json(rr.report.k_dyn.coords)},
                       {"k_geom", repdetail::vec_json(rr.report.k_geom.coords)},
                       {"splitting_residual", rr.report.splitting_residual},
                       {"curvature_residual", rr.report.curvature_residual},
                       {"periodicity_residual", rr.report.periodicity_residual}};
    }
    nlohmann::json recs = nlohmann::json::array();
    for (std::size_t i = 0; i < rr.records.size(); ++i) {
        const ReconstructionRecord& r = rr.records[i];
        recs.push_back({{"s", fam.s_grid[i]},
                        {"period", fam.periods[i]},
                        {"k", repdetail::vec_json(r.k.coords)},
                        {"k_dyn", repdetail::vec_json(r.k_dyn.coords)},
                        {"k_geom", repdetail::vec_json(r.k_geom.coords)},
                        {"pairing_dyn", r.pairing_dyn},
                        {"pairing_geom", r.pairing_geom},
                        {"rec1", r.rec1},
                        {"rec2", r.rec2},
                        {"rec3", r.rec3},
                        {"rec1_rec3_agree", std::abs(r.rec1 - r.rec3) <= 1e-8},
                        {"isotropy_residual", r.isotropy_residual},
                        {"casimir_drift", r.casimir_drift},
                        {"energy_drift", r.energy_drift},
                        {"splitting_residual", r.splitting_residual},
                        {"degenerate", r.degenerate}});
    }
    j["reconstruction"] = recs;
    return j;
}

inline const char* kOrbitsCsvHeader = "s,t,xi_1,xi_2,xi_3,energy,casimir";

/// Orbit trajectories (and thereby the swept-surface boundary, which is the
/// largest-s row) as plot data, subsampled to at most `max_rows_per_orbit`
/// points per orbit.
inline std::string orbits_csv(const RigidBodyFamily& fam,
                              std::size_t max_rows_per_orbit = 512) {
    std::string out = kOrbitsCsvHeader;
    out += '\n';
    for (std::size_t i = 0; i < fam.orbits.size(); ++i) {
        const EulerTrajectory& orb = fam.orbits[i];
        const std::size_t stride =
            std::max<std::size_t>(1, orb.n_steps() / max_rows_per_orbit);
        for (std::size_t j = 0; j < orb.points.size(); j += stride) {
            out += fmt_double(fam.s_grid[i]);
            out += ',';
            out += fmt_double(orb.node_time(j));
            for (int c = 0; c < 3; ++c) {
                out += ',';
                out += fmt_double(orb.points[j][c]);
            }
            out += ',';
            out += fmt_double(orb.energy.empty() ? 0.0 : orb.energy[j]);
            out += ',';
            out += fmt_double(orb.conserved[j]);
            out += '\n';
        }
    }
    return out;
}

/// Structured error record written next to the regular outputs on failure.
inline nlohmann::json error_document(const std::string& type, const std::string& message,
                                     const std::string& field = "", double s = -1.0) {
    nlohmann::json j;
    j["error"]["type"] = type;
    j["error"]["message"] = message;
    if (!field.empty()) j["error"]["field"] = field;
    if (s >= 0.0) j["error"]["s"] = s;
    return j;
}

}  // namespace liefloq
