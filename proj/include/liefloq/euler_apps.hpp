#pragma once

// Concrete systems: linear Euler flows on the algebra and coalgebra driven
// by the fundamental solution, the sl(2,R) Euler coordinate map, and the
// rigid-body reconstruction-phase application with an independent
// spherical-area oracle.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "liefloq/errors.hpp"
#include "liefloq/floquet.hpp"
#include "liefloq/integrator.hpp"
#include "liefloq/lie_core.hpp"
#include "liefloq/phases.hpp"

namespace liefloq {

// ---------------------------------------------------------------------------
// Linear Euler flows
// ---------------------------------------------------------------------------

/// Sampled trajectory of a linear Euler flow, on the algebra (adjoint
/// transport) or the coalgebra (coadjoint transport). `conserved` records
/// the group Casimir per node: the Euclidean norm for so(3) and the
/// Minkowski form w3^2 - w1^2 - w2^2 for sl(2,R).
struct EulerTrajectory {
    GroupId group = GroupId::SO3;
    bool dual = false;  ///< true for coalgebra trajectories
    double period = kTwoPi;
    std::vector<Vec3> points;
    std::vector<double> conserved;
    std::vector<double> energy;  ///< only filled by the rigid-body flows

    std::size_t n_steps() const { return points.size() - 1; }
    double grid_spacing() const { return period / static_cast<double>(n_steps()); }
    double node_time(std::size_t i) const { return static_cast<double>(i) * grid_spacing(); }
};

inline double casimir_value(GroupId g, const Vec3& v) {
    if (g == GroupId::SO3) return v.norm();
    return v.z * v.z - v.x * v.x - v.y * v.y;
}

/// x(t) = Ad_{f(t)} x0: the algebra Euler flow dx/dt = [phi(t), x], driven
/// by the solved fundamental solution rather than a direct vector ODE, so
/// conjugation invariants are preserved to roundoff.
inline EulerTrajectory linear_euler_flow(const PeriodicCurve& phi, const AlgebraElement& x0,
                                         std::size_t n_t, const Tolerances& tol = {}) {
    require_same_context(phi.group(), x0.group, "linear_euler_flow");
    const FundamentalSolution f = solve_fundamental(phi, n_t, tol);
    EulerTrajectory out;
    out.group = phi.group();
    out.period = phi.period();
    out.points.reserve(n_t + 1);
    out.conserved.reserve(n_t + 1);
    for (const auto& g : f.values) {
        const Vec3 v = adjoint(g, x0).coords;
        out.points.push_back(v);
        out.conserved.push_back(casimir_value(out.group, v));
    }
    return out;
}

/// xi(t) = Ad*_{f^{-1}(t)} xi0: the coalgebra Euler flow
/// d xi/dt = -ad*_{phi(t)} xi.
inline EulerTrajectory coadjoint_euler_flow(const PeriodicCurve& phi,
                                            const CoalgebraElement& xi0, std::size_t n_t,
                                            const Tolerances& tol = {}) {
    require_same_context(phi.group(), xi0.group, "coadjoint_euler_flow");
    const FundamentalSolution f = solve_fundamental(phi, n_t, tol);
    EulerTrajectory out;
    out.group = phi.group();
    out.dual = true;
    out.period = phi.period();
    out.points.reserve(n_t + 1);
    out.conserved.reserve(n_t + 1);
    for (const auto& g : f.values) {
        const Vec3 v = coadjoint(g, xi0).coords;
        out.points.push_back(v);
        out.conserved.push_back(casimir_value(out.group, v));
    }
    return out;
}

struct ScalarFourier {
    std::vector<double> cos_coeffs;  ///< cos_coeffs[k] * cos(k w t)
    std::vector<double> sin_coeffs;  ///< sin_coeffs[k] * sin(k w t)
};

/// Map the sl(2,R) coefficient functions a1, a2, a3 (entries of the
/// traceless coefficient matrix) to the Euler coordinates
/// w = (2 a1, -a2 - a3, a2 - a3) as one Fourier curve. The Euler flow in
/// these coordinates is dx/dt = I(w x x) with I = diag(1, 1, -1).
inline PeriodicCurve sl2_euler_coords(const ScalarFourier& a1, const ScalarFourier& a2,
                                      const ScalarFourier& a3, double period = kTwoPi) {
    auto combine = [](const ScalarFourier& u, double cu, const ScalarFourier& v, double cv) {
        ScalarFourier out;
        out.cos_coeffs.resize(std::max(u.cos_coeffs.size(), v.cos_coeffs.size()), 0.0);
        out.sin_coeffs.resize(std::max(u.sin_coeffs.size(), v.sin_coeffs.size()), 0.0);
        for (std::size_t k = 0; k < u.cos_coeffs.size(); ++k) out.cos_coeffs[k] += cu * u.cos_coeffs[k];
        for (std::size_t k = 0; k < v.cos_coeffs.size(); ++k) out.cos_coeffs[k] += cv * v.cos_coeffs[k];
        for (std::size_t k = 0; k < u.sin_coeffs.size(); ++k) out.sin_coeffs[k] += cu * u.sin_coeffs[k];
        for (std::size_t k = 0; k < v.sin_coeffs.size(); ++k) out.sin_coeffs[k] += cv * v.sin_coeffs[k];
        return out;
    };
    const ScalarFourier w1 = combine(a1, 2.0, ScalarFourier{}, 0.0);
    const ScalarFourier w2 = combine(a2, -1.0, a3, -1.0);
    const ScalarFourier w3 = combine(a2, 1.0, a3, -1.0);
    return PeriodicCurve::fourier(GroupId::SL2R,
                                  {w1.cos_coeffs, w2.cos_coeffs, w3.cos_coeffs},
                                  {w1.sin_coeffs, w2.sin_coeffs, w3.sin_coeffs}, period);
}

// ---------------------------------------------------------------------------
// Rigid body: family of periodic orbits on a momentum sphere
// ---------------------------------------------------------------------------

/// Quadratic free-rigid-body Hamiltonian h(xi) = 1/2 sum xi_i^2 / I_i on
/// so(3)*; the variational derivative is the inertia-weighted gradient.
struct RigidBodyHamiltonian {
    Vec3 inertia;

    double energy(const Vec3& xi) const {
        return 0.5 * (xi.x * xi.x / inertia.x + xi.y * xi.y / inertia.y +
                      xi.z * xi.z / inertia.z);
    }
    Vec3 gradient(const Vec3& xi) const {
        return {xi.x / inertia.x, xi.y / inertia.y, xi.z / inertia.z};
    }
};

struct RigidBodyOptions {
    std::size_t n_s = 64;            ///< family rows
    std::size_t n_t = 2048;          ///< pipeline time grid per row
    std::size_t sample_steps = 4096; ///< orbit detection / sampling resolution
    std::size_t fit_harmonics = 32;  ///< truncation of the orbit Fourier fit
    double max_period_factor = 6.0;  ///< detection window in units of T(0)
    Tolerances tol{};
    int threads = 1;
};

struct RigidBodyFamily {
    Vec3 inertia;
    double orbit_radius = 1.0;
    double theta_max = 0.0;
    int stable_axis = 2;  ///< index of the largest moment
    int tilt_axis = 0;    ///< transverse direction of the base points
    bool degenerate = false;  ///< spherical inertia: rest-point family
    double omega_linear = 0.0;

    std::vector<double> s_grid;
    std::vector<double> periods;               ///< detected T(s)
    std::vector<CoalgebraElement> base_points; ///< xi^0_s
    std::vector<EulerTrajectory> orbits;       ///< gamma_s on the sample grid
    std::vector<double> closure_residuals;     ///< ||xi(T) - xi(0)|| per row
    HomotopyFamily family;                     ///< phi(s,t) for the pipeline

    std::size_t n_s() const { return s_grid.size() - 1; }
};

namespace detail {

/// One RKMK4 step of the coupled reconstruction system: Df = phi(xi) with
/// xi = Ad*_{f^{-1}} xi0 reconstructed exactly at every stage, keeping the
/// trajectory on the momentum sphere to roundoff.
inline GroupElement rigid_step(const GroupElement& f, const CoalgebraElement& xi0,
                               const RigidBodyHamiltonian& ham, double h) {
    auto phi_of = [&](const GroupElement& g) {
        const Vec3 xi = coadjoint(g, xi0).coords;
        return AlgebraElement(GroupId::SO3, ham.gradient(xi));
    };
    const AlgebraElement k1 = phi_of(f);
    const AlgebraElement th2 = k1 * (0.5 * h);
    const AlgebraElement k2 = dexpinv_order4(th2, phi_of(exp_group(th2) * f));
    const AlgebraElement th3 = k2 * (0.5 * h);
    const AlgebraElement k3 = dexpinv_order4(th3, phi_of(exp_group(th3) * f));
    const AlgebraElement th4 = k3 * h;
    const AlgebraElement k4 = dexpinv_order4(th4, phi_of(exp_group(th4) * f));
    const AlgebraElement theta = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
    return exp_group(theta) * f;
}

struct CrossingDetector {
    int watch_axis;   ///< coordinate that crosses zero once per period
    int filter_axis;  ///< must stay positive at the return crossing
};

}  // namespace detail

/// Build the one-parameter family of periodic rigid-body orbits around the
/// stable (largest-moment) axis: base points at polar angle s * theta_max on
/// the momentum sphere, periods located by a Poincare return to the initial
/// half-plane with secant refinement of the crossing time. Spherical
/// inertia degenerates to a rest-point family.
inline RigidBodyFamily rigid_body_family(const Vec3& inertia, double orbit_radius,
                                         double theta_max, const RigidBodyOptions& opt = {}) {
    if (inertia.x <= 0.0 || inertia.y <= 0.0 || inertia.z <= 0.0)
        throw Error("rigid_body_family: principal moments must be positive");
    if (orbit_radius <= 0.0) throw Error("rigid_body_family: orbit radius must be positive");
    if (theta_max <= 0.0 || theta_max >= 1.4)
        throw Error("rigid_body_family: theta_max must lie in (0, 1.4) radians");

    RigidBodyFamily fam;
    fam.inertia = inertia;
    fam.orbit_radius = orbit_radius;
    fam.theta_max = theta_max;
    const RigidBodyHamiltonian ham{inertia};

    // Stable axis: strictly largest moment. The base points tilt toward the
    // middle-moment axis, which keeps the whole family well inside the
    // separatrix (tilting toward the smallest moment reaches it much sooner).
    int c = 0;
    for (int i = 1; i < 3; ++i)
        if (inertia[i] > inertia[c]) c = i;
    int a = -1, b = -1;
    for (int i = 0; i < 3; ++i)
        if (i != c) (a < 0 ? a : b) = i;
    if (inertia[b] > inertia[a]) std::swap(a, b);  // a = middle moment
    fam.stable_axis = c;
    fam.tilt_axis = a;

    const double r = orbit_radius;
    const double spread =
        (1.0 / inertia[a] - 1.0 / inertia[c]) * (1.0 / inertia[b] - 1.0 / inertia[c]);
    fam.degenerate = spread <= 1e-24;
    fam.omega_linear = fam.degenerate ? r / inertia[c] : r * std::sqrt(spread);
    const double t_rest = fam.degenerate ? kTwoPi * inertia[c] / r : kTwoPi / fam.omega_linear;

    const std::size_t n_s = opt.n_s;
    fam.s_grid.resize(n_s + 1);
    fam.periods.assign(n_s + 1, t_rest);
    fam.base_points.reserve(n_s + 1);
    fam.orbits.resize(n_s + 1);
    fam.closure_residuals.assign(n_s + 1, 0.0);
    for (std::size_t i = 0; i <= n_s; ++i) {
        fam.s_grid[i] = static_cast<double>(i) / static_cast<double>(n_s);
        const double th = fam.s_grid[i] * theta_max;
        Vec3 base;
        base[c] = r * std::cos(th);
        base[a] = r * std::sin(th);
        fam.base_points.emplace_back(GroupId::SO3, base);
    }

    auto row_curves = std::make_shared<std::vector<PeriodicCurve>>();
    row_curves->resize(n_s + 1);

    if (fam.degenerate) {
        // Every base point is a relative equilibrium; each row is the
        // constant autonomous system phi = grad h(xi^0).
        for (std::size_t i = 0; i <= n_s; ++i) {
            const Vec3 g = ham.gradient(fam.base_points[i].coords);
            (*row_curves)[i] = PeriodicCurve::constant(GroupId::SO3, g, t_rest);
            EulerTrajectory& orb = fam.orbits[i];
            orb.group = GroupId::SO3;
            orb.dual = true;
            orb.period = t_rest;
            orb.points.assign(opt.sample_steps + 1, fam.base_points[i].coords);
            orb.conserved.assign(opt.sample_steps + 1, r);
            orb.energy.assign(opt.sample_steps + 1, ham.energy(fam.base_points[i].coords));
        }
    } else {
        const detail::CrossingDetector det{b, a};
        const double t_max = opt.max_period_factor * t_rest;
        std::vector<std::string> row_errors(n_s + 1);
        parallel_for(n_s + 1, opt.threads, [&](std::size_t i) {
            try {
                const CoalgebraElement& xi0 = fam.base_points[i];
                if (i == 0) {
                    // Rest point at the pole: autonomous row with the
                    // linearization period.
                    const Vec3 g = ham.gradient(xi0.coords);
                    (*row_curves)[0] = PeriodicCurve::constant(GroupId::SO3, g, t_rest);
                    EulerTrajectory& orb = fam.orbits[0];
                    orb.group = GroupId::SO3;
                    orb.dual = true;
                    orb.period = t_rest;
                    orb.points.assign(opt.sample_steps + 1, xi0.coords);
                    orb.conserved.assign(opt.sample_steps + 1, r);
                    orb.energy.assign(opt.sample_steps + 1, ham.energy(xi0.coords));
                    return;
                }
                // March until the orbit returns to the section
                // {xi_watch = 0, xi_tilt > 0}, crossing in the same direction
                // as it left the base point.
                const double rate0 =
                    cross(ham.gradient(xi0.coords), xi0.coords)[det.watch_axis];
                if (std::abs(rate0) < 1e-14)
                    throw OrbitDetectionError("base point is a relative equilibrium");
                const double srate = rate0 > 0.0 ? 1.0 : -1.0;
                const double h = t_rest / static_cast<double>(opt.sample_steps);
                GroupElement f = GroupElement::identity(GroupId::SO3);
                double t = 0.0;
                double prev_w = 0.0;
                GroupElement f_prev = f;
                bool bracketed = false;
                double t_lo = 0.0;
                while (t < t_max) {
                    f_prev = f;
                    f = detail::rigid_step(f, xi0, ham, h);
                    t += h;
                    const Vec3 xi = coadjoint(f, xi0).coords;
                    const double w = xi[det.watch_axis];
                    if (t > h * 1.5 && prev_w * srate < 0.0 && w * srate >= 0.0 &&
                        xi[det.filter_axis] > 0.0) {
                        bracketed = true;
                        t_lo = t - h;
                        break;
                    }
                    prev_w = w;
                }
                if (!bracketed)
                    throw OrbitDetectionError(
                        "orbit did not return to the section within the detection window");
                // Secant refinement of the crossing time, re-stepping from
                // the bracket start each evaluation.
                auto section_value = [&](double dt) {
                    const GroupElement g = detail::rigid_step(f_prev, xi0, ham, dt);
                    return coadjoint(g, xi0).coords[det.watch_axis];
                };
                double d0 = 1e-12, d1 = h;
                double w0 = prev_w, w1 = section_value(h);
                for (int it = 0; it < 60 && std::abs(w1) > 1e-13 * r; ++it) {
                    const double d2 = d1 - w1 * (d1 - d0) / (w1 - w0);
                    d0 = d1;
                    w0 = w1;
                    d1 = std::min(std::max(d2, 0.0), h);
                    w1 = section_value(d1);
                }
                if (std::abs(w1) > 1e-10 * r)
                    throw OrbitDetectionError("section residual did not converge");
                const double period = t_lo + d1;
                fam.periods[i] = period;

                // Sample the closed orbit on its own uniform grid.
                const double hs = period / static_cast<double>(opt.sample_steps);
                EulerTrajectory& orb = fam.orbits[i];
                orb.group = GroupId::SO3;
                orb.dual = true;
                orb.period = period;
                orb.points.reserve(opt.sample_steps + 1);
                orb.conserved.reserve(opt.sample_steps + 1);
                orb.energy.reserve(opt.sample_steps + 1);
                GroupElement g = GroupElement::identity(GroupId::SO3);
                for (std::size_t jn = 0; jn <= opt.sample_steps; ++jn) {
                    const Vec3 xi = coadjoint(g, xi0).coords;
                    orb.points.push_back(xi);
                    orb.conserved.push_back(xi.norm());
                    orb.energy.push_back(ham.energy(xi));
                    if (jn < opt.sample_steps) g = detail::rigid_step(g, xi0, ham, hs);
                }
                fam.closure_residuals[i] = (orb.points.back() - orb.points.front()).norm();
                if (fam.closure_residuals[i] > 1e-8)
                    throw OrbitDetectionError("orbit failed to close after the detected period");

                // The coefficient curve phi(s,t) = grad h(xi_s(t)) is the
                // inertia-scaled trigonometric fit of the orbit samples.
                std::vector<Vec3> samples(opt.sample_steps);
                for (std::size_t jn = 0; jn < opt.sample_steps; ++jn)
                    samples[jn] = ham.gradient(orb.points[jn]);
                detail::TrigSeries series = detail::fit_trig_series(samples, period);
                const std::size_t keep = std::min(series.cos_c.size(),
                                                  opt.fit_harmonics + 1);
                series.cos_c.resize(keep);
                series.sin_c.resize(keep);
                (*row_curves)[i] = PeriodicCurve::from_function(
                    GroupId::SO3, [series](double t_in) { return series.eval(t_in); },
                    period);
            } catch (const Error& e) {
                row_errors[i] = e.what();
            }
        });
        for (std::size_t i = 0; i <= n_s; ++i)
            if (!row_errors[i].empty())
                throw OrbitDetectionError("row s=" + std::to_string(fam.s_grid[i]) + ": " +
                                          row_errors[i]);
    }

    HomotopyFamily hf;
    hf.kind = HomotopyFamily::Kind::UserSupplied;
    hf.group = GroupId::SO3;
    hf.metadata = "rigid-body rest-point family; base points at polar angle s*theta_max";
    const std::vector<double> s_nodes = fam.s_grid;
    hf.make_curve = [row_curves, s_nodes](double s) {
        const double pos = s * static_cast<double>(s_nodes.size() - 1);
        const auto idx = static_cast<std::size_t>(std::llround(pos));
        if (idx >= row_curves->size() || std::abs(pos - static_cast<double>(idx)) > 1e-9)
            throw Error("rigid-body family is defined on its own s grid only");
        return (*row_curves)[idx];
    };
    const std::vector<double> periods = fam.periods;
    hf.period_at = [periods, s_nodes](double s) {
        const double pos = s * static_cast<double>(s_nodes.size() - 1);
        const auto idx = static_cast<std::size_t>(std::llround(pos));
        return periods[std::min(idx, periods.size() - 1)];
    };
    hf.base_curve = (*row_curves).back();
    // The s = 0 row is autonomous with constant coefficient a0, so the
    // continuation starts from k(0) = T(0) a0 rather than zero.
    const Vec3 a0 = ham.gradient(fam.base_points.front().coords);
    hf.initial_log = AlgebraElement(GroupId::SO3, a0 * fam.periods.front());
    fam.family = hf;
    return fam;
}

// ---------------------------------------------------------------------------
// Reconstruction phases and the area oracle
// ---------------------------------------------------------------------------

/// Signed Kirillov area of the cap swept by the family up to gamma_s,
/// computed purely from the stored orbit: the boundary line integral
/// r * closed-integral (1 - cos theta) d phi around the stable axis,
/// traversed in the flow direction. Spectrally accurate (periodic
/// integrand, uniform nodes, analytic d phi/dt from the Euler equation).
inline double spherical_area_oracle(const RigidBodyFamily& fam, std::size_t s_idx) {
    if (fam.degenerate || s_idx == 0) return 0.0;
    const EulerTrajectory& orb = fam.orbits[s_idx];
    const RigidBodyHamiltonian ham{fam.inertia};
    // right-handed transverse pair about the stable axis, so the signed
    // azimuth follows the standard orientation of the sphere
    const int c = fam.stable_axis;
    const int i1 = (c + 1) % 3, i2 = (c + 2) % 3;
    const double r = fam.orbit_radius;
    const std::size_t n = orb.n_steps();
    const double h = orb.grid_spacing();
    double acc = 0.0;
    double prev_phi_angle = 0.0;
    double winding_sign = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const Vec3& xi = orb.points[j];
        const double x = xi[i1], y = xi[i2];
        const double rho2 = x * x + y * y;
        if (rho2 <= 1e-20 * r * r)
            throw OracleUnavailable("orbit passes through the pole; azimuth undefined");
        // analytic azimuth rate from d xi/dt = grad h x xi
        const Vec3 rhs = cross(ham.gradient(xi), xi);
        const double dphi = (x * rhs[i2] - y * rhs[i1]) / rho2;
        const double phi_angle = std::atan2(y, x);
        if (j > 0) {
            double step_angle = phi_angle - prev_phi_angle;
            while (step_angle > M_PI) step_angle -= kTwoPi;
            while (step_angle < -M_PI) step_angle += kTwoPi;
            if (winding_sign == 0.0 && std::abs(step_angle) > 1e-14)
                winding_sign = step_angle > 0.0 ? 1.0 : -1.0;
            else if (winding_sign * step_angle < -1e-12)
                throw OracleUnavailable("boundary loop is not monotone in azimuth");
        }
        prev_phi_angle = phi_angle;
        acc += (1.0 - xi[c] / r) * dphi * h;
    }
    return r * acc;
}

/// Kirillov area of a polar cap of angle theta on the radius-r orbit sphere
/// (closed form used by the oracle's own unit checks).
inline double spherical_cap_area(double r, double theta) {
    return kTwoPi * r * (1.0 - std::cos(theta));
}

struct ReconstructionRecord {
    AlgebraElement k, k_dyn, k_geom;
    double pairing_dyn = 0.0;   ///< <xi0, k_dyn>
    double pairing_geom = 0.0;  ///< <xi0, k_geom>
    double rec1 = 0.0;  ///< integral of <xi, grad h> over one period
    double rec2 = 0.0;  ///< symplectic area of the swept surface
    double rec3 = 0.0;  ///< 2 T(s) h(xi0)
    double isotropy_residual = 0.0;  ///< ||Ad*_{m(s)} xi0 - xi0||
    double casimir_drift = 0.0;
    double energy_drift = 0.0;
    double splitting_residual = 0.0;
    bool degenerate = false;
};

struct ReconstructionResult {
    PhaseReport report;
    FloquetFactorGrid grid;
    std::vector<ReconstructionRecord> records;  ///< one per s node
};

/// Run the full phase pipeline on the rigid-body family (variable periods)
/// and evaluate the reconstruction identities at every s node.
inline ReconstructionResult reconstruction_phases(const RigidBodyFamily& fam,
                                                  const RigidBodyOptions& opt = {}) {
    ReconstructionResult out;
    const RigidBodyHamiltonian ham{fam.inertia};

    if (fam.degenerate) {
        // Rest-point report: every row is autonomous, k = T grad h(xi0),
        // the factor is the identity and the geometric phase vanishes.
        out.records.reserve(fam.s_grid.size());
        for (std::size_t i = 0; i < fam.s_grid.size(); ++i) {
            ReconstructionRecord rec;
            rec.degenerate = true;
            const Vec3 xi0 = fam.base_points[i].coords;
            const double period = fam.periods[i];
            rec.k = AlgebraElement(GroupId::SO3, ham.gradient(xi0) * period);
            rec.k_dyn = rec.k;
            rec.k_geom = AlgebraElement::zero(GroupId::SO3);
            rec.pairing_dyn = dot(xi0, rec.k_dyn.coords);
            rec.rec1 = period * dot(xi0, ham.gradient(xi0));
            rec.rec3 = 2.0 * period * ham.energy(xi0);
            out.records.push_back(rec);
        }
        return out;
    }

    PhaseOptions popt;
    popt.n_t = opt.n_t;
    popt.n_s = fam.n_s();
    popt.tol = opt.tol;
    popt.threads = opt.threads;

    const FamilySolution sol = solve_family(fam.family, popt.n_s, popt.n_t, popt.tol,
                                            popt.threads);
    std::vector<GroupElement> m_of_s;
    m_of_s.reserve(sol.rows.size());
    for (const auto& row : sol.rows) m_of_s.push_back(row.monodromy_candidate());
    ContinuationOptions copts;
    copts.branch_jump = popt.tol.branch_jump;
    copts.manifold_tol = popt.tol.manifold;
    copts.initial_log = fam.family.initial_log;
    const std::vector<AlgebraElement> ks = continue_log_branch(m_of_s, copts);
    out.grid = floquet_factor(sol, ks, popt.tol);
    const FloquetFactorGrid& grid = out.grid;

    PhaseReport& rep = out.report;
    rep.homotopy_kind = fam.family.kind;
    rep.n_t = popt.n_t;
    rep.n_s = popt.n_s;
    rep.periodicity_residual = grid.periodicity_residual;
    rep.s_grid = grid.s_grid;
    rep.k_of_s = ks;
    rep.branch_rule = "branch continuation in s from the rest-point log k(0) = T(0) a0";
    rep.end_monodromy = monodromy(sol.rows.back(), popt.tol.manifold);

    const detail::FactorFields fields = detail::factor_fields(grid);
    const std::size_t n_t = grid.n_t();
    const auto wt = quadrature::simpson_weights(n_t, kTwoPi / static_cast<double>(n_t));
    std::vector<Vec3> row_bracket(grid.s_grid.size());
    for (std::size_t i = 0; i < grid.s_grid.size(); ++i) {
        Vec3 acc;
        for (std::size_t j = 0; j <= n_t; ++j)
            acc += bracket(fields.du(i, j), fields.dtau(i, j)).coords * wt[j];
        row_bracket[i] = acc;
    }

    out.records.reserve(grid.s_grid.size());
    for (std::size_t i = 0; i < grid.s_grid.size(); ++i) {
        ReconstructionRecord rec;
        const Vec3 xi0 = fam.base_points[i].coords;
        const double period = fam.periods[i];
        rec.k = ks[i];
        rec.k_dyn = dynamic_phase(grid, i);
        const auto wu = detail::u_prefix_weights(grid.s_grid, i);
        Vec3 acc;
        for (std::size_t u = 0; u <= i; ++u) acc += row_bracket[u] * wu[u];
        rec.k_geom = AlgebraElement(GroupId::SO3, acc);
        rec.splitting_residual = (rec.k - rec.k_dyn - rec.k_geom).norm();
        rec.pairing_dyn = dot(xi0, rec.k_dyn.coords);
        rec.pairing_geom = dot(xi0, rec.k_geom.coords);

        const EulerTrajectory& orb = fam.orbits[i];
        std::vector<double> integrand(orb.points.size());
        for (std::size_t jn = 0; jn < orb.points.size(); ++jn)
            integrand[jn] = dot(orb.points[jn], ham.gradient(orb.points[jn]));
        rec.rec1 = quadrature::simpson(integrand, orb.grid_spacing());
        rec.rec2 =
            i == 0 ? 0.0 : detail::surface_pairing(fam.base_points[i], grid, fields, i);
        rec.rec3 = 2.0 * period * ham.energy(xi0);

        const CoalgebraElement moved = coadjoint(m_of_s[i].inverse(), fam.base_points[i]);
        rec.isotropy_residual = (moved.coords - xi0).norm();
        for (std::size_t jn = 0; jn < orb.points.size(); ++jn) {
            rec.casimir_drift =
                std::max(rec.casimir_drift, std::abs(orb.conserved[jn] - orb.conserved[0]));
            rec.energy_drift =
                std::max(rec.energy_drift, std::abs(orb.energy[jn] - orb.energy[0]));
        }
        out.records.push_back(rec);

        rep.k_dyn_of_s.push_back(rec.k_dyn);
        rep.k_geom_of_s.push_back(rec.k_geom);
        rep.splitting_of_s.push_back(rec.splitting_residual);
        rep.splitting_residual_max =
            std::max(rep.splitting_residual_max, rec.splitting_residual);
    }
    rep.k = ks.back();
    rep.k_dyn = rep.k_dyn_of_s.back();
    rep.k_geom = rep.k_geom_of_s.back();
    rep.splitting_residual = rep.splitting_of_s.back();
    rep.curvature_residual = zero_curvature_residual(grid);
    for (int cidx = 0; cidx < 3; ++cidx) {
        Vec3 e;
        e[cidx] = 1.0;
        const double surf = detail::surface_pairing(CoalgebraElement(GroupId::SO3, e), grid,
                                                    fields, grid.s_grid.size() - 1);
        rep.surface_check[cidx] = std::abs(rep.k_geom.coords[cidx] - surf);
    }
    return out;
}

}  // namespace liefloq
