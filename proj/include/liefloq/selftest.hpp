#pragma once

// Built-in invariant suite behind the `selftest` verb: kernel identities,
// the D-operator identity set, integrator order and drift, the phase
// splitting on both groups, and the two-route consistency checks. Inputs
// are pinned, output carries no timestamps, and rows are emitted in a fixed
// order, so reruns are byte-identical at any thread count.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "liefloq/euler_apps.hpp"
#include "liefloq/floquet.hpp"
#include "liefloq/integrator.hpp"
#include "liefloq/lie_core.hpp"
#include "liefloq/phases.hpp"

namespace liefloq {

struct SelftestOptions {
    int threads = 1;
    /// Test hook: flips the sign of ad* inside the consistency check so the
    /// harness can prove it detects injected faults.
    bool mutate_ad_star_sign = false;
};

namespace selftest_detail {

struct Row {
    std::string name;
    double residual;
    double tolerance;
    bool pass;
};

inline AlgebraElement pinned_algebra(GroupId g, std::mt19937& gen, double scale) {
    std::uniform_real_distribution<double> d(-scale, scale);
    const double a = d(gen), b = d(gen), c = d(gen);
    return AlgebraElement(g, {a, b, c});
}

inline PeriodicCurve pinned_rotating_field(GroupId g, double eps, double c) {
    return PeriodicCurve::fourier(g, {{{0.0, eps}, {0.0, 0.0}, {c}}},
                                  {{{}, {0.0, eps}, {}}});
}

}  // namespace selftest_detail

/// Run every check, print one row per check, and return the number of
/// failures (the process exit code of the `selftest` verb).
inline int run_selftest(std::ostream& os, const SelftestOptions& opt = {}) {
    using selftest_detail::Row;
    std::vector<Row> rows;
    auto check = [&rows](const std::string& name, double residual, double tolerance) {
        rows.push_back({name, residual, tolerance, residual <= tolerance});
    };
    const GroupId groups[] = {GroupId::SO3, GroupId::SL2R};
    std::mt19937 gen(0x51e57e57u);  // pinned seed

    // --- kernel identities ---------------------------------------------
    for (GroupId g : groups) {
        const LieContext& ctx = LieContext::get(g);
        double jac = 0.0;
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j)
                for (int k = 0; k < 3; ++k)
                    for (int m = 0; m < 3; ++m) {
                        double acc = 0.0;
                        for (int l = 0; l < 3; ++l)
                            acc += ctx.structure_constants[i][j][l] *
                                       ctx.structure_constants[l][k][m] +
                                   ctx.structure_constants[j][k][l] *
                                       ctx.structure_constants[l][i][m] +
                                   ctx.structure_constants[k][i][l] *
                                       ctx.structure_constants[l][j][m];
                        jac = std::max(jac, std::abs(acc));
                    }
        check(std::string("jacobi-identity-") + group_name(g), jac, 1e-14);
    }

    for (GroupId g : groups) {
        double worst = 0.0;
        for (int rep = 0; rep < 24; ++rep) {
            const AlgebraElement x = selftest_detail::pinned_algebra(g, gen, 1.2);
            if (g == GroupId::SO3 && x.norm() >= M_PI - 1e-2) continue;
            const GroupElement e = exp_group(x);
            const LogResult lr = log_group(e);
            worst = std::max(worst, (lr.principal.coords - x.coords).norm());
        }
        check(std::string("exp-log-round-trip-") + group_name(g), worst, 1e-10);
    }

    for (GroupId g : groups) {
        double worst = 0.0;
        for (int rep = 0; rep < 16; ++rep) {
            const GroupElement a = exp_group(selftest_detail::pinned_algebra(g, gen, 0.8));
            const GroupElement b = exp_group(selftest_detail::pinned_algebra(g, gen, 0.8));
            const AlgebraElement x = selftest_detail::pinned_algebra(g, gen, 1.0);
            const AlgebraElement lhs = adjoint(a * b, x);
            const AlgebraElement rhs = adjoint(a, adjoint(b, x));
            worst = std::max(worst, (lhs.coords - rhs.coords).norm());
        }
        check(std::string("adjoint-homomorphism-") + group_name(g), worst, 1e-12);
    }

    // ad* / pairing / Kirillov consistency; the mutation hook flips the
    // ad* sign so an injected fault must surface here.
    {
        double worst = 0.0;
        const double flip = opt.mutate_ad_star_sign ? -1.0 : 1.0;
        for (GroupId g : groups)
            for (int rep = 0; rep < 16; ++rep) {
                const AlgebraElement x = selftest_detail::pinned_algebra(g, gen, 1.0);
                const AlgebraElement y = selftest_detail::pinned_algebra(g, gen, 1.0);
                const CoalgebraElement mu(g, selftest_detail::pinned_algebra(g, gen, 1.0).coords);
                const CoalgebraElement as =
                    CoalgebraElement(g, ad_star(x, mu).coords * flip);
                worst = std::max(worst,
                                 std::abs(pairing(as, y) - pairing(mu, bracket(x, y))));
                worst = std::max(worst, std::abs(kirillov(mu, x, y) + kirillov(mu, y, x)));
            }
        check("adstar-pairing-kirillov", worst, 1e-13);
    }

    // --- D identities at h = 2 pi / 1024 --------------------------------
    {
        const std::size_t n = 1024;
        const double h = kTwoPi / static_cast<double>(n);
        double r_sub = 0.0, r_inv = 0.0, r_prod = 0.0, r_flow = 0.0;
        for (GroupId g : groups) {
            const AlgebraElement a = selftest_detail::pinned_algebra(g, gen, 0.5);
            const AlgebraElement b = selftest_detail::pinned_algebra(g, gen, 0.4);
            auto curve = [&](double t) {
                return exp_group(a * std::sin(t)) * exp_group(b * (1.0 - std::cos(t)));
            };
            auto curve2 = [&](double t) { return exp_group(b * std::sin(2.0 * t)); };
            std::vector<GroupElement> sub, alpha, alpha_inv, beta, prod;
            std::vector<CoordMat> ad_alpha;
            for (std::size_t i = 0; i <= n; ++i) {
                const double t = static_cast<double>(i) * h;
                sub.push_back(exp_group(a * t));
                alpha.push_back(curve(t));
                alpha_inv.push_back(curve(t).inverse());
                beta.push_back(curve2(t));
                prod.push_back(curve(t) * curve2(t));
                ad_alpha.push_back(adjoint_matrix(alpha.back()));
            }
            for (std::size_t i : {41u, 512u, 983u}) {
                r_sub = std::max(r_sub, (d_operator(sub, h, i).coords - a.coords).norm());
                const AlgebraElement da = d_operator(alpha, h, i);
                r_inv = std::max(r_inv, (d_operator(alpha_inv, h, i).coords +
                                         adjoint(alpha_inv[i], da).coords)
                                            .norm());
                const AlgebraElement db = d_operator(beta, h, i);
                const AlgebraElement dprod = d_operator(prod, h, i);
                r_prod = std::max(
                    r_prod, (dprod.coords - (da + adjoint(alpha[i], db)).coords).norm());
                // d/dt Ad_alpha = ad_{D alpha} Ad_alpha, with a fourth-order
                // stencil on the Ad matrices
                const double* w = stencil::five_point_weights(2);
                CoordMat fd;
                for (int k = -2; k <= 2; ++k)
                    fd = fd + ad_alpha[static_cast<std::size_t>(static_cast<long>(i) + k)] *
                                  (w[k + 2] / h);
                CoordMat ad_da;
                for (int col = 0; col < 3; ++col) {
                    Vec3 e;
                    e[col] = 1.0;
                    const Vec3 bc = bracket(da, AlgebraElement(g, e)).coords;
                    for (int r = 0; r < 3; ++r) ad_da(r, col) = bc[r];
                }
                r_flow = std::max(r_flow, (fd - ad_da * ad_alpha[i]).frobenius_norm());
            }
        }
        check("d-of-one-parameter-subgroup", r_sub, 1e-8);
        check("d-of-inverse-curve", r_inv, 1e-8);
        check("d-of-translated-product", r_prod, 1e-8);
        check("adjoint-flow-equation", r_flow, 1e-8);
    }

    // --- integrator order and drift --------------------------------------
    {
        const PeriodicCurve phi =
            selftest_detail::pinned_rotating_field(GroupId::SO3, 0.3, 0.4);
        const GroupElement m_exact =
            exp_group(AlgebraElement(GroupId::SO3, Vec3{0.3, 0.0, -0.6} * kTwoPi));
        std::vector<double> errs;
        for (std::size_t n : {64u, 128u, 256u})
            errs.push_back(frobenius_distance(
                solve_fundamental(phi, n).monodromy_candidate().matrix, m_exact.matrix));
        double order_dev = 0.0;
        for (std::size_t i = 1; i < errs.size(); ++i)
            order_dev = std::max(order_dev, std::abs(std::log2(errs[i - 1] / errs[i]) - 4.0));
        check("integrator-order-deviation", order_dev, 0.2);
        check("manifold-drift-per-period",
              solve_fundamental(phi, 1024).step_stats.max_drift, 1e-9);
        check("monodromy-closed-form",
              frobenius_distance(solve_fundamental(phi, 1024).monodromy_candidate().matrix,
                                 m_exact.matrix),
              1e-8);
    }

    // --- phase splitting and the two-route checks ------------------------
    for (GroupId g : groups) {
        PhaseOptions popt;
        popt.n_t = 128;
        popt.n_s = 128;
        popt.threads = opt.threads;
        const PhaseReport rep =
            split_phases(selftest_detail::pinned_rotating_field(g, 0.3, 0.4), popt);
        check(std::string("phase-splitting-") + group_name(g), rep.splitting_residual_max,
              1e-6);
        check(std::string("surface-integral-agreement-") + group_name(g),
              std::max({rep.surface_check.x, rep.surface_check.y, rep.surface_check.z}),
              1e-10);
        check(std::string("factor-periodicity-") + group_name(g), rep.periodicity_residual,
              1e-5);
    }

    // dynamic phase: adjoint-transport route vs Hamiltonian pairing route
    {
        double worst = 0.0;
        for (GroupId g : groups) {
            const HomotopyFamily fam =
                build_linear_homotopy(selftest_detail::pinned_rotating_field(g, 0.3, 0.4));
            const FamilySolution sol = solve_family(fam, 32, 128, {}, opt.threads);
            std::vector<GroupElement> ms;
            for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
            const FloquetFactorGrid grid = floquet_factor(sol, continue_log_branch(ms));
            const AlgebraElement kd = dynamic_phase(grid, 32);
            for (int c = 0; c < 3; ++c) {
                Vec3 e;
                e[c] = 1.0;
                const CoalgebraElement mu(g, e);
                worst = std::max(worst, std::abs(dynamic_phase_pairing(mu, grid, 32) -
                                                 pairing(mu, kd)));
            }
        }
        check("dynamic-phase-two-routes", worst, 1e-12);
    }

    // --- determinism digest ----------------------------------------------
    {
        auto digest = [&](int threads) {
            PhaseOptions popt;
            popt.n_t = 64;
            popt.n_s = 32;
            popt.threads = threads;
            const PhaseReport rep = split_phases(
                selftest_detail::pinned_rotating_field(GroupId::SO3, 0.25, 0.55), popt);
            std::string s;
            for (std::size_t i = 0; i < rep.s_grid.size(); ++i)
                for (int c = 0; c < 3; ++c) {
                    char buf[32];
                    std::snprintf(buf, sizeof(buf), "%.17g,", rep.k_of_s[i].coords[c]);
                    s += buf;
                }
            return s;
        };
        const std::string one = digest(1);
        const std::string four = digest(4);
        check("determinism-across-thread-counts", one == four ? 0.0 : 1.0, 0.5);
    }

    int failures = 0;
    os << "check                                   residual      tolerance     status\n";
    for (const Row& r : rows) {
        char line[160];
        std::snprintf(line, sizeof(line), "%-38s  %.6e  %.6e  %s\n", r.name.c_str(),
                      r.residual, r.tolerance, r.pass ? "PASS" : "FAIL");
        os << line;
        if (!r.pass) ++failures;
    }
    char tail[80];
    std::snprintf(tail, sizeof(tail), "%zu checks, %d failed\n", rows.size(), failures);
    os << tail;
    return failures;
}

}  // namespace liefloq
