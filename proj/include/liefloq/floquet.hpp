#pragma once

// Monodromy extraction and reducibility classification, branch-continued log
// phases k(s), and construction of the periodic Floquet factor
// p(s,t) = f(s,t) exp(-t k(s)/T(s)).

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "liefloq/errors.hpp"
#include "liefloq/integrator.hpp"
#include "liefloq/lie_core.hpp"
#include "liefloq/numerics.hpp"

namespace liefloq {

// ---------------------------------------------------------------------------
// Monodromy classification
// ---------------------------------------------------------------------------

struct MonodromyReport {
    GroupElement m;
    LogResult log;
    bool reducible = false;
    /// Reducibility of the associated linear Euler system on the algebra;
    /// always true for the two supported groups since m = +-exp(k).
    bool adjoint_reducible = false;
    /// Coordinates v of the Euler-system log: Ad_m = exp(ad of v).
    Vec3 adjoint_log_coords;
};

/// Classify the monodromy element m = f(T) of a solved system. For SL(2,R)
/// elements outside the exp image the center decomposition m = (-I) exp(k)
/// feeds the adjoint (Euler) classification, which always succeeds.
inline MonodromyReport monodromy(const FundamentalSolution& f, double manifold_tol = 1e-6) {
    MonodromyReport rep;
    rep.m = f.monodromy_candidate();
    rep.log = log_group(rep.m, manifold_tol);
    rep.reducible = rep.log.in_exp_image();
    rep.adjoint_reducible = true;
    rep.adjoint_log_coords = rep.log.principal.coords;
    return rep;
}

// ---------------------------------------------------------------------------
// Log branch enumeration and continuation
// ---------------------------------------------------------------------------

namespace detail {

// Matrix rotation rate of an elliptic sl(2,R) algebra element: exp runs
// through a full turn when it reaches 2*pi.
inline double sl2_elliptic_angle(const AlgebraElement& x) {
    const double d = x.matrix.det();
    return d > 0.0 ? std::sqrt(d) : 0.0;
}

}  // namespace detail

/// All log branches of m reachable with moderate norm: the principal log
/// with the rotation angle shifted by 2*pi*n, n in [-2, 2], along the fixed
/// axis (both axis signs when the angle is pi). Near-identity elements have
/// an unreliable axis, so the branch axis is borrowed from `k_prev`.
inline std::vector<AlgebraElement> log_branch_candidates(const GroupElement& m,
                                                         const AlgebraElement& k_prev,
                                                         double manifold_tol = 1e-6) {
    const LogResult lr = log_group(m, manifold_tol);
    if (!lr.in_exp_image())
        throw UniformReducibilityViolated("log branches requested outside the exp image", -1.0);

    std::vector<AlgebraElement> out;
    const GroupId g = m.group;
    const bool so3 = g == GroupId::SO3;
    const double angle = so3 ? lr.principal.norm() : detail::sl2_elliptic_angle(lr.principal);

    if (angle <= 1e-7) {
        // m is (numerically) the identity, or hyperbolic/parabolic. Near the
        // identity every full turn about any axis works; the axis of the
        // nonprincipal branches is unreadable from m, so it is borrowed from
        // the previous continuation value.
        out.push_back(lr.principal);
        const double prev_angle = so3 ? k_prev.norm() : detail::sl2_elliptic_angle(k_prev);
        const bool near_identity =
            frobenius_distance(m.matrix, Mat::identity(matrix_dim(g))) <= 1e-7;
        if (near_identity && prev_angle > 1e-9) {
            const AlgebraElement axis = k_prev * (1.0 / prev_angle);
            for (int n = 1; n <= 2; ++n) {
                out.push_back(axis * (kTwoPi * static_cast<double>(n)));
                out.push_back(axis * (-kTwoPi * static_cast<double>(n)));
            }
        }
        return out;
    }

    auto push_unique = [&](const AlgebraElement& k) {
        for (const auto& existing : out)
            if ((existing - k).norm() <= 1e-9) return;
        out.push_back(k);
    };
    const AlgebraElement axis = lr.principal * (1.0 / angle);
    for (int n = -2; n <= 2; ++n)
        out.push_back(axis * (angle + kTwoPi * static_cast<double>(n)));
    if (lr.status == LogStatus::BranchFamily) {
        // angle-pi case: the opposite axis is an equally valid branch
        // (dropping shifts that coincide with the principal family)
        for (int n = -2; n <= 2; ++n)
            push_unique(-axis * (angle + kTwoPi * static_cast<double>(n)));
    }
    return out;
}

struct ContinuationOptions {
    double branch_jump = 0.5;    ///< max allowed ||k_i - k_{i-1}||
    double manifold_tol = 1e-6;
    AlgebraElement initial_log;  ///< k at the first node; zero by default
};

/// Continue the log phase k(s) along a list of monodromy elements, starting
/// from `initial_log` at the first node and choosing, at every subsequent
/// node, the branch candidate closest to the previous value. Throws
/// UniformReducibilityViolated when some m(s) leaves the exp image and
/// BranchAmbiguity when no candidate (or more than one) lies within the
/// jump threshold.
inline std::vector<AlgebraElement> continue_log_branch(const std::vector<GroupElement>& m_of_s,
                                                       const ContinuationOptions& opts = {}) {
    if (m_of_s.empty()) throw Error("continue_log_branch: empty input");
    const double n_span = static_cast<double>(m_of_s.size() - 1);
    auto s_at = [&](std::size_t i) {
        return n_span == 0.0 ? 0.0 : static_cast<double>(i) / n_span;
    };

    AlgebraElement k0 = opts.initial_log;
    if (k0.group != m_of_s.front().group)
        k0 = AlgebraElement::zero(m_of_s.front().group);
    if (frobenius_distance(exp_group(k0).matrix, m_of_s.front().matrix) > 1e-6)
        throw Error("continue_log_branch: initial log does not exponentiate to m(0)");

    std::vector<AlgebraElement> ks;
    ks.reserve(m_of_s.size());
    ks.push_back(k0);
    for (std::size_t i = 1; i < m_of_s.size(); ++i) {
        std::vector<AlgebraElement> cand;
        try {
            cand = log_branch_candidates(m_of_s[i], ks.back(), opts.manifold_tol);
        } catch (const UniformReducibilityViolated&) {
            throw UniformReducibilityViolated(
                "monodromy left the exp image during continuation", s_at(i));
        }
        double best = -1.0, second = -1.0;
        std::size_t best_idx = 0;
        for (std::size_t c = 0; c < cand.size(); ++c) {
            const double d = (cand[c] - ks.back()).norm();
            if (best < 0.0 || d < best) {
                second = best;
                best = d;
                best_idx = c;
            } else if (second < 0.0 || d < second) {
                second = d;
            }
        }
        if (best > opts.branch_jump) {
            // The continued log diverges when the family approaches the
            // boundary of the exp image; if a later monodromy actually
            // leaves it, report the reducibility loss rather than a
            // resolution problem.
            for (std::size_t ahead = i; ahead < m_of_s.size(); ++ahead) {
                if (!log_group(m_of_s[ahead], opts.manifold_tol).in_exp_image())
                    throw UniformReducibilityViolated(
                        "monodromy leaves the exp image; branch continuation diverges "
                        "approaching it",
                        s_at(ahead));
            }
            throw BranchAmbiguity("smallest branch jump " + std::to_string(best) +
                                      " exceeds the threshold; refine the s grid",
                                  s_at(i));
        }
        if (second >= 0.0 && second <= opts.branch_jump)
            throw BranchAmbiguity("two log branches within the jump threshold", s_at(i));
        ks.push_back(cand[best_idx]);
    }
    return ks;
}

// ---------------------------------------------------------------------------
// Floquet factor grid
// ---------------------------------------------------------------------------

/// The periodic factor p(s,t) on the family grid together with the branch
/// data k(s). Row i is sampled at t_j = j T(s_i) / N_t, so a column index
/// is a fixed normalized phase across rows.
struct FloquetFactorGrid {
    GroupId group = GroupId::SO3;
    std::vector<double> s_grid;
    std::vector<double> periods;            ///< T(s) per row
    std::vector<AlgebraElement> k_of_s;
    Grid2D<GroupElement> p_values;          ///< (N_s+1) x (N_t+1)
    Grid2D<AlgebraElement> phi_values;      ///< phi(s_i, t_j), sampled at build
    double periodicity_residual = 0.0;      ///< max_s ||p(s,T) - p(s,0)||
    std::string branch_rule;

    std::size_t n_s() const { return s_grid.size() - 1; }
    std::size_t n_t() const { return p_values.cols() - 1; }
    double node_time(std::size_t s_idx, std::size_t t_idx) const {
        return periods[s_idx] * static_cast<double>(t_idx) / static_cast<double>(n_t());
    }
};

/// Assemble p(s_i, t_j) = f(s_i, t_j) exp(-(j/N_t) k(s_i)) and verify the
/// factor-grid invariants: p(., 0) = e by construction, the s = 0 row equals
/// the identity, and the periodicity residual stays below tolerance (a
/// violation signals a wrong branch or insufficient resolution).
inline FloquetFactorGrid floquet_factor(const FamilySolution& family,
                                        const std::vector<AlgebraElement>& k_of_s,
                                        const Tolerances& tol = {}) {
    if (k_of_s.size() != family.rows.size())
        throw Error("floquet_factor: k(s) and family sizes do not match");
    FloquetFactorGrid grid;
    grid.group = family.family.group;
    grid.s_grid = family.s_grid;
    grid.k_of_s = k_of_s;
    const std::size_t n_rows = family.rows.size();
    const std::size_t n_t = family.rows.front().n_steps();
    grid.periods.resize(n_rows);
    grid.p_values = Grid2D<GroupElement>(n_rows, n_t + 1, GroupElement::identity(grid.group));
    grid.phi_values = Grid2D<AlgebraElement>(n_rows, n_t + 1, AlgebraElement::zero(grid.group));

    for (std::size_t i = 0; i < n_rows; ++i) {
        const FundamentalSolution& row = family.rows[i];
        if (row.n_steps() != n_t) throw Error("floquet_factor: ragged family grid");
        grid.periods[i] = row.period;
        for (std::size_t j = 0; j <= n_t; ++j) {
            const double frac = static_cast<double>(j) / static_cast<double>(n_t);
            grid.p_values(i, j) = row.values[j] * exp_group(k_of_s[i] * (-frac));
            grid.phi_values(i, j) = row.phi.evaluate(row.node_time(j));
        }
        const double res =
            frobenius_distance(grid.p_values(i, n_t).matrix, grid.p_values(i, 0).matrix);
        grid.periodicity_residual = std::max(grid.periodicity_residual, res);
        if (res > tol.periodicity)
            throw FactorizationError("factor periodicity residual " + std::to_string(res) +
                                     " at s=" + std::to_string(grid.s_grid[i]) +
                                     ": wrong branch or insufficient resolution");
    }
    // The first row must be trivial: either the trivial system or an
    // autonomous rest-point row whose flow is exactly exp(t k(0)/T(0)).
    const int mdim = matrix_dim(grid.group);
    for (std::size_t j = 0; j <= n_t; ++j) {
        const double res =
            frobenius_distance(grid.p_values(0, j).matrix, Mat::identity(mdim));
        if (res > tol.periodicity)
            throw FactorizationError(
                "s = 0 factor row is not the identity; the family does not start at a "
                "trivial or autonomous system");
    }
    return grid;
}

/// Time derivative of the factor in closed form, no finite differencing:
/// D_t p(s,t) = phi(s,t) - Ad_{p(s,t)} k(s) / T(s). Uses the coefficient
/// samples embedded in the grid.
inline AlgebraElement analytic_dt_p(const FloquetFactorGrid& grid, std::size_t s_idx,
                                    std::size_t t_idx) {
    const double period = grid.periods[s_idx];
    const AlgebraElement transported =
        adjoint(grid.p_values(s_idx, t_idx), grid.k_of_s[s_idx]);
    return grid.phi_values(s_idx, t_idx) - transported * (1.0 / period);
}

}  // namespace liefloq
