// Command-line driver: analyze/sweep run the phase pipeline on a configured
// periodic system, rigidbody runs the reconstruction-phase application, and
// selftest executes the built-in invariant suite. Outputs are written under
// --out and are byte-identical across reruns of the same configuration.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "liefloq/config.hpp"
#include "liefloq/report.hpp"
#include "liefloq/selftest.hpp"
#include "liefloq/version.hpp"

namespace {

using namespace liefloq;

struct CommonOpts {
    std::string config_path;
    std::string out_dir = ".";
    int threads = -1;  // -1: not given, fall back to the environment
    std::vector<std::string> tol_overrides;
};

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_config) {
    auto* c = cmd->add_option("--config", opts.config_path, "JSON configuration file");
    if (needs_config) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory (created if missing)");
    cmd->add_option("--threads", opts.threads,
                    "worker threads (0 = all cores; default: FLOQUET_LIE_THREADS or 1)");
    cmd->add_option("--tolerance-override", opts.tol_overrides,
                    "override a tolerance, KEY=VAL (drift, manifold, splitting, "
                    "branch_jump, periodicity)");
}

int resolve_threads(int cli_value) {
    if (cli_value >= 0) return cli_value == 0 ? 0 : cli_value;
    if (const char* env = std::getenv("FLOQUET_LIE_THREADS")) {
        try {
            return std::max(0, std::stoi(env));
        } catch (...) {
            return 1;
        }
    }
    return 1;
}

AnalysisConfig load_config(const CommonOpts& opts) {
    std::ifstream in(opts.config_path);
    if (!in) throw ConfigError("cannot open config file: " + opts.config_path, "config");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what(), "config");
    }
    AnalysisConfig cfg = parse_config(j);
    for (const std::string& ov : opts.tol_overrides) apply_tolerance_override(cfg.tol, ov);
    return cfg;
}

std::filesystem::path out_path(const CommonOpts& opts, const std::string& name) {
    std::filesystem::create_directories(opts.out_dir);
    return std::filesystem::path(opts.out_dir) / name;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write " + p.string());
    out << text;
}

void write_json(const std::filesystem::path& p, const nlohmann::json& j) {
    write_text(p, j.dump(2) + "\n");
}

void write_error(const CommonOpts& opts, const std::string& report_name,
                 const std::string& type, const std::string& message,
                 const std::string& field = "", double s = -1.0) {
    try {
        write_json(out_path(opts, report_name), error_document(type, message, field, s));
    } catch (...) {
        // the error record is best-effort; the exit code carries the result
    }
}

int run_pipeline(const CommonOpts& opts, bool emit_report, bool emit_csv) {
    std::string report_name = "report.json";
    try {
        const AnalysisConfig cfg = load_config(opts);
        report_name = cfg.output.report;
        PhaseOptions popt;
        popt.n_t = cfg.n_t;
        popt.n_s = cfg.n_s;
        popt.tol = cfg.tol;
        popt.homotopy = cfg.homotopy;
        popt.threads = resolve_threads(opts.threads);
        const PhaseReport rep = split_phases(make_curve(cfg), popt);

        if (emit_report) {
            const auto p = out_path(opts, cfg.output.report);
            write_json(p, report_document(cfg, rep));
            std::cout << "report: " << p.string() << "\n";
        }
        if (emit_csv) {
            const auto p = out_path(opts, cfg.output.sweep);
            write_text(p, sweep_csv(rep));
            std::cout << "sweep: " << p.string() << "\n";
        }
        std::cout << "monodromy: " << (rep.end_monodromy.reducible ? "reducible" : "not reducible")
                  << " (" << log_status_name(rep.end_monodromy.log.status) << ")\n"
                  << "k      = (" << fmt_double(rep.k.coords.x) << ", "
                  << fmt_double(rep.k.coords.y) << ", " << fmt_double(rep.k.coords.z) << ")\n"
                  << "k_dyn  = (" << fmt_double(rep.k_dyn.coords.x) << ", "
                  << fmt_double(rep.k_dyn.coords.y) << ", " << fmt_double(rep.k_dyn.coords.z)
                  << ")\n"
                  << "k_geom = (" << fmt_double(rep.k_geom.coords.x) << ", "
                  << fmt_double(rep.k_geom.coords.y) << ", " << fmt_double(rep.k_geom.coords.z)
                  << ")\n"
                  << "splitting residual = " << fmt_double(rep.splitting_residual) << "\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error at '" << e.field << "': " << e.what() << "\n";
        write_error(opts, report_name, "ConfigError", e.what(), e.field);
        return 1;
    } catch (const UniformReducibilityViolated& e) {
        std::cerr << "pipeline error: " << e.what() << " (s = " << e.s << ")\n";
        write_error(opts, report_name, "UniformReducibilityViolated", e.what(), "", e.s);
        return 2;
    } catch (const BranchAmbiguity& e) {
        std::cerr << "pipeline error: " << e.what() << " (s = " << e.s << ")\n";
        write_error(opts, report_name, "BranchAmbiguity", e.what(), "", e.s);
        return 2;
    } catch (const Error& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        write_error(opts, report_name, "PipelineError", e.what());
        return 2;
    }
}

int run_rigidbody(const CommonOpts& opts) {
    std::string report_name = "report.json";
    try {
        const AnalysisConfig cfg = load_config(opts);
        report_name = cfg.output.report;
        if (!cfg.rigid.present)
            throw ConfigError("the rigidbody command requires a rigid_body block",
                              "rigid_body");
        RigidBodyOptions ropt;
        ropt.n_s = cfg.n_s;
        ropt.n_t = cfg.n_t;
        ropt.sample_steps = cfg.rigid.sample_steps;
        ropt.fit_harmonics = cfg.rigid.fit_harmonics;
        ropt.tol = cfg.tol;
        ropt.threads = resolve_threads(opts.threads);
        const RigidBodyFamily fam = rigid_body_family(cfg.rigid.inertia,
                                                      cfg.rigid.orbit_radius,
                                                      cfg.rigid.theta_max, ropt);
        const ReconstructionResult rr = reconstruction_phases(fam, ropt);

        const auto rp = out_path(opts, cfg.output.report);
        write_json(rp, rigidbody_document(cfg, fam, rr));
        const auto op = out_path(opts, cfg.output.orbits);
        write_text(op, orbits_csv(fam));
        std::cout << "report: " << rp.string() << "\norbits: " << op.string() << "\n";

        const ReconstructionRecord& end = rr.records.back();
        std::cout << "T(1) = " << fmt_double(fam.periods.back())
                  << "\n<xi0, k_dyn>  = " << fmt_double(end.pairing_dyn)
                  << "  (2 T h = " << fmt_double(end.rec3) << ")\n<xi0, k_geom> = "
                  << fmt_double(end.pairing_geom)
                  << "  (surface area = " << fmt_double(end.rec2) << ")\n";
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error at '" << e.field << "': " << e.what() << "\n";
        write_error(opts, report_name, "ConfigError", e.what(), e.field);
        return 1;
    } catch (const Error& e) {
        std::cerr << "pipeline error: " << e.what() << "\n";
        write_error(opts, report_name, "PipelineError", e.what());
        return 2;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Floquet analysis of periodic Lie systems on SO(3) and SL(2,R)"};
    app.set_version_flag("--version", std::string("liefloq ") + liefloq::kVersion);
    app.require_subcommand(1);

    CommonOpts analyze_opts, sweep_opts, rigid_opts, selftest_opts;
    bool mutate_ad_star = false;

    CLI::App* analyze =
        app.add_subcommand("analyze", "run the phase pipeline and write a JSON report");
    add_common(analyze, analyze_opts, true);
    CLI::App* sweep =
        app.add_subcommand("sweep", "run the phase pipeline and write the per-s CSV table");
    add_common(sweep, sweep_opts, true);
    CLI::App* rigid = app.add_subcommand(
        "rigidbody", "rigid-body reconstruction phases; writes a report and orbit CSV");
    add_common(rigid, rigid_opts, true);
    CLI::App* selftest =
        app.add_subcommand("selftest", "run the built-in invariant suite");
    add_common(selftest, selftest_opts, false);
    selftest
        ->add_flag("--mutate-ad-star-sign", mutate_ad_star,
                   "testing hook: inject a sign fault to prove the suite catches it")
        ->group("");  // hidden

    CLI11_PARSE(app, argc, argv);

    if (analyze->parsed()) return run_pipeline(analyze_opts, true, false);
    if (sweep->parsed()) return run_pipeline(sweep_opts, false, true);
    if (rigid->parsed()) return run_rigidbody(rigid_opts);
    if (selftest->parsed()) {
        liefloq::SelftestOptions sopt;
        sopt.threads = resolve_threads(selftest_opts.threads);
        sopt.mutate_ad_star_sign = mutate_ad_star;
        return liefloq::run_selftest(std::cout, sopt);
    }
    return 0;
}
