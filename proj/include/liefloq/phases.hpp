#pragma once

// Homotopy-family construction, dynamic and geometric phase evaluation, the
// surface-integral cross-check on the coadjoint orbit, and the
// zero-curvature diagnostic. The split is
//
//     k(s) = k_dyn(s) + k_geom(s)
//
// with k_dyn the time integral of Ad_{p^{-1}} phi over one period and k_geom
// the cylinder integral of [D_u p^{-1}, D_t p^{-1}]. Variable-period
// families are handled in flow-normalized time tau = 2 pi t / T(s), in which
// every row is 2 pi periodic and column indices line up across rows.

#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "liefloq/errors.hpp"
#include "liefloq/floquet.hpp"
#include "liefloq/integrator.hpp"
#include "liefloq/lie_core.hpp"
#include "liefloq/numerics.hpp"

namespace liefloq {

// ---------------------------------------------------------------------------
// Homotopy builders
// ---------------------------------------------------------------------------

/// The linear family phi(s,t) = s * phi(t): always satisfies the family
/// hypotheses (periodic in t, vanishing at s = 0), no log of the factor
/// loop required.
inline HomotopyFamily build_linear_homotopy(const PeriodicCurve& phi) {
    HomotopyFamily fam;
    fam.kind = HomotopyFamily::Kind::LinearScale;
    fam.group = phi.group();
    fam.base_curve = phi;
    fam.make_curve = [phi](double s) { return phi.scaled(s); };
    fam.period_at = [p = phi.period()](double) { return p; };
    fam.initial_log = AlgebraElement::zero(phi.group());
    fam.metadata = "linear scaling of the base coefficients";
    return fam;
}

namespace detail {

/// Real trigonometric interpolation of periodic samples q_0..q_{N-1} (node
/// N duplicates node 0 and is dropped): coefficient arrays for
/// q(t) = sum_k a_k cos(k w t) + b_k sin(k w t).
struct TrigSeries {
    std::vector<Vec3> cos_c, sin_c;
    double period = kTwoPi;

    Vec3 eval(double t) const {
        const double w = kTwoPi / period;
        Vec3 acc;
        for (std::size_t k = 0; k < cos_c.size(); ++k) {
            const double arg = w * static_cast<double>(k) * t;
            acc += cos_c[k] * std::cos(arg) + sin_c[k] * std::sin(arg);
        }
        return acc;
    }
    Vec3 eval_derivative(double t) const {
        const double w = kTwoPi / period;
        Vec3 acc;
        for (std::size_t k = 1; k < cos_c.size(); ++k) {
            const double kw = w * static_cast<double>(k);
            const double arg = kw * t;
            acc += sin_c[k] * (kw * std::cos(arg)) - cos_c[k] * (kw * std::sin(arg));
        }
        return acc;
    }
};

inline TrigSeries fit_trig_series(const std::vector<Vec3>& samples, double period) {
    const std::size_t n = samples.size();  // periodic samples, no duplicate
    const std::size_t kmax = n / 2;
    TrigSeries ts;
    ts.period = period;
    ts.cos_c.assign(kmax + 1, Vec3{});
    ts.sin_c.assign(kmax + 1, Vec3{});
    for (std::size_t k = 0; k <= kmax; ++k) {
        Vec3 ca, sa;
        for (std::size_t j = 0; j < n; ++j) {
            const double arg = kTwoPi * static_cast<double>(k * j) / static_cast<double>(n);
            ca += samples[j] * std::cos(arg);
            sa += samples[j] * std::sin(arg);
        }
        const bool edge = (k == 0) || (2 * k == n);
        const double scale = (edge ? 1.0 : 2.0) / static_cast<double>(n);
        ts.cos_c[k] = ca * scale;
        ts.sin_c[k] = edge ? Vec3{} : sa * scale;
    }
    return ts;
}

}  // namespace detail

/// Build the exponential-interpolation homotopy of a contractible factor
/// loop: with q(t) a continuous log of p(t) starting at q(0) = 0, set
/// p(s,t) = exp(s q(t)), k(s) = s k, and recover the family coefficients
/// from the factor identity phi(s,t) = Ad_{p(s,t)} k(s) / T + D_t p(s,t).
/// Throws HomotopyUnavailable when the continued log fails to close, i.e.
/// when the loop is not contractible.
inline HomotopyFamily build_geodesic_homotopy(const std::vector<GroupElement>& p_loop,
                                              const AlgebraElement& k, double period = kTwoPi,
                                              const Tolerances& tol = {}) {
    if (p_loop.size() < 9) throw ResolutionError("geodesic homotopy: loop grid too coarse");
    const GroupId g = p_loop.front().group;
    if (frobenius_distance(p_loop.front().matrix, Mat::identity(matrix_dim(g))) > 1e-8)
        throw Error("geodesic homotopy: loop must be based at the identity");

    std::vector<AlgebraElement> q;
    try {
        ContinuationOptions copts;
        copts.manifold_tol = tol.manifold;
        q = continue_log_branch(p_loop, copts);
    } catch (const Error& e) {
        throw HomotopyUnavailable(std::string("no continuous log along the loop: ") + e.what());
    }
    if (q.back().norm() > 1e-5)
        throw HomotopyUnavailable(
            "the continued log does not return to zero: the factor loop is not "
            "contractible");

    std::vector<Vec3> samples(q.size() - 1);
    for (std::size_t j = 0; j + 1 < q.size(); ++j) samples[j] = q[j].coords;
    const detail::TrigSeries series = detail::fit_trig_series(samples, period);

    HomotopyFamily fam;
    fam.kind = HomotopyFamily::Kind::Geodesic;
    fam.group = g;
    fam.initial_log = AlgebraElement::zero(g);
    fam.metadata = "exponential interpolation exp(s log p(t)) of the factor loop";
    const Vec3 k_coords = k.coords;
    auto phi_at = [g, series, k_coords, period](double s, double t) {
        const AlgebraElement q_t(g, series.eval(t));
        const AlgebraElement dq_t(g, series.eval_derivative(t));
        const AlgebraElement sq = q_t * s;
        const GroupElement p_st = exp_group(sq);
        const AlgebraElement transported = adjoint(p_st, AlgebraElement(g, k_coords * s));
        return transported.coords * (1.0 / period) + dexp_right(sq, dq_t * s).coords;
    };
    fam.make_curve = [g, phi_at, period](double s) {
        return PeriodicCurve::from_function(
            g, [phi_at, s](double t) { return phi_at(s, t); }, period);
    };
    fam.period_at = [period](double) { return period; };
    fam.base_curve = fam.make_curve(1.0);
    return fam;
}

// ---------------------------------------------------------------------------
// Phase integrals
// ---------------------------------------------------------------------------

/// Dynamic phase at one s node: the composite-Simpson time integral of
/// Ad_{p^{-1}(s,t)} phi(s,t) over [0, T(s)].
inline AlgebraElement dynamic_phase(const FloquetFactorGrid& grid, std::size_t s_idx) {
    const std::size_t n_t = grid.n_t();
    const double h = grid.periods[s_idx] / static_cast<double>(n_t);
    const auto w = quadrature::simpson_weights(n_t, h);
    Vec3 acc;
    for (std::size_t j = 0; j <= n_t; ++j) {
        const GroupElement p_inv = grid.p_values(s_idx, j).inverse();
        acc += adjoint(p_inv, grid.phi_values(s_idx, j)).coords * w[j];
    }
    return AlgebraElement(grid.group, acc);
}

/// Hamiltonian route to the same number: <mu, k_dyn> = -int H_t(Ad*_{p^-1} mu) dt
/// with H_t(xi) = -<xi, phi(s,t)>. Exposed as a cross-check of the adjoint
/// route above; the two agree to roundoff.
inline double dynamic_phase_pairing(const CoalgebraElement& mu, const FloquetFactorGrid& grid,
                                    std::size_t s_idx) {
    const std::size_t n_t = grid.n_t();
    const double h = grid.periods[s_idx] / static_cast<double>(n_t);
    const auto w = quadrature::simpson_weights(n_t, h);
    double acc = 0.0;
    for (std::size_t j = 0; j <= n_t; ++j) {
        const CoalgebraElement xi = coadjoint(grid.p_values(s_idx, j), mu);
        acc += pairing(xi, grid.phi_values(s_idx, j)) * w[j];
    }
    return acc;
}

namespace detail {

/// D_t p^{-1}(s,t) in closed form: k(s)/T(s) - Ad_{p^{-1}} phi.
inline AlgebraElement dt_p_inverse(const FloquetFactorGrid& grid, std::size_t i,
                                   std::size_t j) {
    const GroupElement p_inv = grid.p_values(i, j).inverse();
    return grid.k_of_s[i] * (1.0 / grid.periods[i]) -
           adjoint(p_inv, grid.phi_values(i, j));
}

/// Derivative fields of the factor grid in flow-normalized time:
/// du = D_u p^{-1} by fourth-order s-stencils on the inverse grid, and
/// dtau = D_tau p^{-1} = (T(u)/2pi) D_t p^{-1} in closed form.
struct FactorFields {
    Grid2D<AlgebraElement> du;    // D_u p^{-1}
    Grid2D<AlgebraElement> dtau;  // D_tau p^{-1}
};

inline FactorFields factor_fields(const FloquetFactorGrid& grid) {
    const std::size_t rows = grid.s_grid.size();
    const std::size_t cols = grid.n_t() + 1;
    if (rows < 5) throw ResolutionError("factor fields need at least 5 s nodes");
    const double ds = grid.s_grid[1] - grid.s_grid[0];
    FactorFields f;
    f.du = Grid2D<AlgebraElement>(rows, cols, AlgebraElement::zero(grid.group));
    f.dtau = Grid2D<AlgebraElement>(rows, cols, AlgebraElement::zero(grid.group));
    std::vector<Mat> pinv_col(rows);
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i)
            pinv_col[i] = grid.p_values(i, j).inverse().matrix;
        for (std::size_t i = 0; i < rows; ++i) {
            const Mat dm = stencil::derivative<Mat>(
                [&](std::size_t r) { return pinv_col[r]; }, rows, ds, i, false);
            f.du(i, j) = AlgebraElement::from_matrix(
                grid.group, dm * grid.p_values(i, j).matrix);
            f.dtau(i, j) = dt_p_inverse(grid, i, j) * (grid.periods[i] / kTwoPi);
        }
    }
    return f;
}

inline std::vector<double> u_prefix_weights(const std::vector<double>& s_grid,
                                            std::size_t s_idx) {
    const double ds = s_grid[1] - s_grid[0];
    if (s_idx == 0) return {0.0};
    if (s_idx == 1) return {0.5 * ds, 0.5 * ds};  // trapezoid on a single cell
    return quadrature::simpson_weights(s_idx, ds);
}

}  // namespace detail

/// Geometric phase at one s node: the double quadrature of
/// [D_u p^{-1}, D_tau p^{-1}] over the cylinder [0, s] x [0, 2 pi], with
/// fourth-order s-stencils and composite Simpson in both directions.
inline AlgebraElement geometric_phase(const FloquetFactorGrid& grid, std::size_t s_idx) {
    if (grid.s_grid.size() < 9)
        throw ResolutionError("geometric phase needs at least 9 s nodes");
    const detail::FactorFields f = detail::factor_fields(grid);
    const std::size_t n_t = grid.n_t();
    const auto wt = quadrature::simpson_weights(n_t, kTwoPi / static_cast<double>(n_t));
    const auto wu = detail::u_prefix_weights(grid.s_grid, s_idx);
    Vec3 acc;
    for (std::size_t i = 0; i <= s_idx; ++i) {
        Vec3 row;
        for (std::size_t j = 0; j <= n_t; ++j)
            row += bracket(f.du(i, j), f.dtau(i, j)).coords * wt[j];
        acc += row * wu[i];
    }
    return AlgebraElement(grid.group, acc);
}

namespace detail {

inline double surface_pairing(const CoalgebraElement& mu, const FloquetFactorGrid& grid,
                              const FactorFields& f, std::size_t s_idx) {
    const std::size_t n_t = grid.n_t();
    const auto wt = quadrature::simpson_weights(n_t, kTwoPi / static_cast<double>(n_t));
    const auto wu = u_prefix_weights(grid.s_grid, s_idx);
    double acc = 0.0;
    for (std::size_t i = 0; i <= s_idx; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j <= n_t; ++j) {
            const GroupElement& p = grid.p_values(i, j);
            const CoalgebraElement transported = coadjoint(p, mu);  // F(u, tau)
            const AlgebraElement du_p = -adjoint(p, f.du(i, j));    // D_u p
            const AlgebraElement dt_p = -adjoint(p, f.dtau(i, j));  // D_tau p
            row += kirillov(transported, du_p, dt_p) * wt[j];
        }
        acc += row * wu[i];
    }
    return acc;
}

}  // namespace detail

/// Surface-integral route to <mu, k_geom(s)>: the pulled-back orbit
/// symplectic form evaluated through F(u,t) = Ad*_{p^{-1}} mu, integrated
/// over the oriented cylinder (du before dtau). Uses the same s-stencil
/// data as geometric_phase but runs the algebra through the coadjoint
/// transport and the Kirillov form, so the two routes agree to roundoff.
inline double geometric_phase_surface(const CoalgebraElement& mu,
                                      const FloquetFactorGrid& grid, std::size_t s_idx) {
    if (grid.s_grid.size() < 9)
        throw ResolutionError("geometric phase needs at least 9 s nodes");
    const detail::FactorFields f = detail::factor_fields(grid);
    return detail::surface_pairing(mu, grid, f, s_idx);
}

// ---------------------------------------------------------------------------
// Zero-curvature diagnostic
// ---------------------------------------------------------------------------

/// Max interior residual of d(D_t sigma)/ds - d(D_s sigma)/dt
/// + [D_t sigma, D_s sigma] over a two-parameter group-valued grid. The
/// identity holds for any smooth sigma, so the residual measures pure
/// stencil truncation and decays at fourth order under refinement.
inline double zero_curvature_residual(const Grid2D<GroupElement>& sigma, double ds, double dt) {
    const std::size_t rows = sigma.rows(), cols = sigma.cols();
    if (rows < 9 || cols < 9)
        throw ResolutionError("zero-curvature residual needs at least 9x9 nodes");
    const GroupId g = sigma(0, 0).group;
    Grid2D<AlgebraElement> dt_field(rows, cols, AlgebraElement::zero(g));
    Grid2D<AlgebraElement> ds_field(rows, cols, AlgebraElement::zero(g));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            const Mat inv = sigma(i, j).inverse().matrix;
            const Mat dmt = stencil::derivative<Mat>(
                [&](std::size_t c) { return sigma(i, c).matrix; }, cols, dt, j, false);
            const Mat dms = stencil::derivative<Mat>(
                [&](std::size_t r) { return sigma(r, j).matrix; }, rows, ds, i, false);
            dt_field(i, j) = AlgebraElement::from_matrix(g, dmt * inv);
            ds_field(i, j) = AlgebraElement::from_matrix(g, dms * inv);
        }
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < rows; ++i)
        for (std::size_t j = 2; j + 2 < cols; ++j) {
            const Vec3 dsdt = stencil::derivative<Vec3>(
                [&](std::size_t r) { return dt_field(r, j).coords; }, rows, ds, i, false);
            const Vec3 dtds = stencil::derivative<Vec3>(
                [&](std::size_t c) { return ds_field(i, c).coords; }, cols, dt, j, false);
            const Vec3 res =
                dsdt - dtds + bracket(dt_field(i, j), ds_field(i, j)).coords;
            worst = std::max(worst, res.norm());
        }
    return worst;
}

/// Curvature diagnostic of a solved factor grid, taken in flow-normalized
/// time so variable-period rows line up.
inline double zero_curvature_residual(const FloquetFactorGrid& grid) {
    const double ds = grid.s_grid[1] - grid.s_grid[0];
    const double dtau = kTwoPi / static_cast<double>(grid.n_t());
    return zero_curvature_residual(grid.p_values, ds, dtau);
}

// ---------------------------------------------------------------------------
// End-to-end pipeline
// ---------------------------------------------------------------------------

struct PhaseOptions {
    std::size_t n_t = 256;
    std::size_t n_s = 256;
    Tolerances tol{};
    HomotopyFamily::Kind homotopy = HomotopyFamily::Kind::LinearScale;
    int threads = 1;
};

/// Everything the pipeline knows about one system: the monodromy log and its
/// split at s = 1, the per-s sweep, and all recorded residuals.
struct PhaseReport {
    AlgebraElement k, k_dyn, k_geom;  ///< at s = 1
    double splitting_residual = 0.0;  ///< ||k - k_dyn - k_geom|| at s = 1
    double splitting_residual_max = 0.0;  ///< max over all s nodes
    double curvature_residual = 0.0;
    double periodicity_residual = 0.0;
    Vec3 surface_check;  ///< |<e_i*, k_geom> - surface integral| per basis covector
    HomotopyFamily::Kind homotopy_kind = HomotopyFamily::Kind::LinearScale;
    std::string branch_rule;
    std::size_t n_t = 0, n_s = 0;
    MonodromyReport end_monodromy;

    std::vector<double> s_grid;
    std::vector<AlgebraElement> k_of_s, k_dyn_of_s, k_geom_of_s;
    std::vector<double> splitting_of_s;
};

/// Run the full pipeline on a prepared family: solve the rows, continue the
/// log branch from the family's initial log, build the factor grid, and
/// evaluate both phases at every s node. Fails loudly on reducibility,
/// branch, or factorization trouble.
inline PhaseReport split_phases_family(const HomotopyFamily& fam, const PhaseOptions& opt) {
    const FamilySolution sol = solve_family(fam, opt.n_s, opt.n_t, opt.tol, opt.threads);

    std::vector<GroupElement> m_of_s;
    m_of_s.reserve(sol.rows.size());
    for (const auto& row : sol.rows) m_of_s.push_back(row.monodromy_candidate());
    ContinuationOptions copts;
    copts.branch_jump = opt.tol.branch_jump;
    copts.manifold_tol = opt.tol.manifold;
    copts.initial_log = fam.initial_log;
    const std::vector<AlgebraElement> ks = continue_log_branch(m_of_s, copts);

    FloquetFactorGrid grid = floquet_factor(sol, ks, opt.tol);
    grid.branch_rule = "branch continuation in s from k(0), " +
                       log_group(m_of_s.back(), opt.tol.manifold).branch_rule;

    const detail::FactorFields fields = detail::factor_fields(grid);
    const std::size_t n_t = grid.n_t();
    const auto wt = quadrature::simpson_weights(n_t, kTwoPi / static_cast<double>(n_t));

    PhaseReport rep;
    rep.homotopy_kind = fam.kind;
    rep.branch_rule = grid.branch_rule;
    rep.n_t = opt.n_t;
    rep.n_s = opt.n_s;
    rep.periodicity_residual = grid.periodicity_residual;
    rep.s_grid = grid.s_grid;
    rep.end_monodromy = monodromy(sol.rows.back(), opt.tol.manifold);

    const std::size_t rows = grid.s_grid.size();
    rep.k_of_s = ks;
    rep.k_dyn_of_s.reserve(rows);
    rep.k_geom_of_s.reserve(rows);
    rep.splitting_of_s.reserve(rows);

    // tau-integrated bracket field per row; the u prefix quadrature then
    // yields k_geom at every node in one pass.
    std::vector<Vec3> row_bracket(rows);
    for (std::size_t i = 0; i < rows; ++i) {
        Vec3 acc;
        for (std::size_t j = 0; j <= n_t; ++j)
            acc += bracket(fields.du(i, j), fields.dtau(i, j)).coords * wt[j];
        row_bracket[i] = acc;
    }
    for (std::size_t i = 0; i < rows; ++i) {
        rep.k_dyn_of_s.push_back(dynamic_phase(grid, i));
        const auto wu = detail::u_prefix_weights(grid.s_grid, i);
        Vec3 acc;
        for (std::size_t r = 0; r <= i; ++r) acc += row_bracket[r] * wu[r];
        rep.k_geom_of_s.emplace_back(grid.group, acc);
        const double res =
            (ks[i] - rep.k_dyn_of_s[i] - rep.k_geom_of_s[i]).norm();
        rep.splitting_of_s.push_back(res);
        rep.splitting_residual_max = std::max(rep.splitting_residual_max, res);
    }

    rep.k = ks.back();
    rep.k_dyn = rep.k_dyn_of_s.back();
    rep.k_geom = rep.k_geom_of_s.back();
    rep.splitting_residual = rep.splitting_of_s.back();
    rep.curvature_residual = zero_curvature_residual(grid);
    for (int c = 0; c < 3; ++c) {
        Vec3 e;
        e[c] = 1.0;
        const double surf =
            geometric_phase_surface(CoalgebraElement(grid.group, e), grid, rows - 1);
        rep.surface_check[c] = std::abs(rep.k_geom.coords[c] - surf);
    }
    return rep;
}

/// Split the log monodromy of an individual system into dynamic and
/// geometric phases. The default homotopy is the linear one; the geodesic
/// kind first runs the linear pipeline to fix the branch k and the factor
/// loop, then rebuilds and re-runs the exponential-interpolation family.
inline PhaseReport split_phases(const PeriodicCurve& phi, const PhaseOptions& opt = {}) {
    const HomotopyFamily linear = build_linear_homotopy(phi);
    PhaseReport rep = split_phases_family(linear, opt);
    if (opt.homotopy == HomotopyFamily::Kind::LinearScale) return rep;

    // Recover the factor loop at s = 1 and rebuild along exp(s log p(t)).
    const FundamentalSolution f1 = solve_fundamental(phi, opt.n_t, opt.tol);
    std::vector<GroupElement> p_loop;
    p_loop.reserve(f1.values.size());
    const std::size_t n_t = f1.n_steps();
    for (std::size_t j = 0; j <= n_t; ++j) {
        const double frac = static_cast<double>(j) / static_cast<double>(n_t);
        p_loop.push_back(f1.values[j] * exp_group(rep.k * (-frac)));
    }
    const HomotopyFamily geo =
        build_geodesic_homotopy(p_loop, rep.k, phi.period(), opt.tol);
    return split_phases_family(geo, opt);
}

}  // namespace liefloq
