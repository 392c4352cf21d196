#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "liefloq/phases.hpp"
#include "test_helpers.hpp"

using namespace liefloq;
using testutil::random_algebra;

namespace {

PeriodicCurve rotating_field(GroupId g, double eps, double c) {
    return PeriodicCurve::fourier(g, {{{0.0, eps}, {0.0, 0.0}, {c}}},
                                  {{{}, {0.0, eps}, {}}});
}

FloquetFactorGrid factor_grid_of(const PeriodicCurve& phi, std::size_t n_s,
                                 std::size_t n_t) {
    const HomotopyFamily fam = build_linear_homotopy(phi);
    const FamilySolution sol = solve_family(fam, n_s, n_t);
    std::vector<GroupElement> ms;
    for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
    return floquet_factor(sol, continue_log_branch(ms));
}

// CoordMat exponential by plain Taylor series (test-only oracle).
CoordMat coordmat_exp(const CoordMat& a) {
    CoordMat acc = CoordMat::identity();
    CoordMat term = CoordMat::identity();
    for (int n = 1; n <= 40; ++n) {
        term = term * a * (1.0 / n);
        acc = acc + term;
    }
    return acc;
}

}  // namespace

TEST_CASE("linear homotopy: slices, endpoints, invariants") {
    const PeriodicCurve phi = rotating_field(GroupId::SO3, 0.3, 0.4);
    const HomotopyFamily fam = build_linear_homotopy(phi);
    CHECK(fam.kind == HomotopyFamily::Kind::LinearScale);
    for (double t : {0.0, 1.1, 4.0}) {
        CHECK((fam.eval(1.0, t).coords - phi.evaluate(t).coords).norm() == 0.0);
        CHECK(fam.eval(0.0, t).norm() == 0.0);
        CHECK((fam.eval(0.5, t + kTwoPi).coords - fam.eval(0.5, t).coords).norm() <=
              1e-15);
    }
    const HomotopyFamily zero = build_linear_homotopy(PeriodicCurve::constant(GroupId::SO3, {}));
    CHECK(zero.eval(0.7, 2.0).norm() == 0.0);
}

TEST_CASE("geodesic homotopy of the trivial loop is the straight line to k") {
    const AlgebraElement k(GroupId::SO3, {0.2, -0.1, 0.5});
    std::vector<GroupElement> loop(65, GroupElement::identity(GroupId::SO3));
    const HomotopyFamily fam = build_geodesic_homotopy(loop, k);
    for (double s : {0.0, 0.3, 1.0})
        for (double t : {0.0, 2.0, 5.5}) {
            const Vec3 expect = k.coords * (s / kTwoPi);
            CHECK((fam.eval(s, t).coords - expect).norm() <= 1e-12);
        }
}

TEST_CASE("geodesic homotopy reproduces the base system at s = 1") {
    const PeriodicCurve phi = rotating_field(GroupId::SO3, 0.3, 0.4);
    const std::size_t n_t = 256;
    const FundamentalSolution f = solve_fundamental(phi, n_t);
    std::vector<GroupElement> ms{f.monodromy_candidate()};
    // continued branch for the single end system via the linear family
    const FloquetFactorGrid grid = factor_grid_of(phi, 32, n_t);
    const AlgebraElement k = grid.k_of_s.back();
    std::vector<GroupElement> loop;
    for (std::size_t j = 0; j <= n_t; ++j) {
        const double frac = static_cast<double>(j) / static_cast<double>(n_t);
        loop.push_back(f.values[j] * exp_group(k * (-frac)));
    }
    const HomotopyFamily geo = build_geodesic_homotopy(loop, k);
    for (double t : {0.0, 0.9, 3.3, 6.1}) {
        CHECK((geo.eval(1.0, t).coords - phi.evaluate(t).coords).norm() <= 1e-6);
        CHECK(geo.eval(0.0, t).norm() <= 1e-12);
    }
}

TEST_CASE("geodesic homotopy rejects non-contractible loops") {
    // a full turn about z closes in SO(3) but its log does not return to zero
    const std::size_t n = 64;
    std::vector<GroupElement> loop;
    for (std::size_t j = 0; j <= n; ++j) {
        const double t = kTwoPi * static_cast<double>(j) / static_cast<double>(n);
        loop.push_back(exp_group(AlgebraElement(GroupId::SO3, {0, 0, t})));
    }
    CHECK_THROWS_AS(build_geodesic_homotopy(loop, AlgebraElement::zero(GroupId::SO3)),
                    HomotopyUnavailable);
}

TEST_CASE("dynamic phase: trivial and constant systems") {
    const FloquetFactorGrid zero =
        factor_grid_of(PeriodicCurve::constant(GroupId::SO3, {}), 16, 32);
    CHECK(dynamic_phase(zero, 16).norm() <= 1e-13);

    const Vec3 a{0.1, -0.2, 0.4};
    const FloquetFactorGrid grid =
        factor_grid_of(PeriodicCurve::constant(GroupId::SO3, a), 32, 64);
    const AlgebraElement kd = dynamic_phase(grid, 32);
    CHECK((kd.coords - a * kTwoPi).norm() <= 1e-12);
}

TEST_CASE("dynamic phase agrees with its Hamiltonian pairing route") {
    for (GroupId g : {GroupId::SO3, GroupId::SL2R}) {
        const PeriodicCurve phi = rotating_field(g, 0.3, 0.4);
        const FloquetFactorGrid grid = factor_grid_of(phi, 32, 128);
        for (std::size_t i : {7u, 20u, 32u}) {
            const AlgebraElement kd = dynamic_phase(grid, i);
            for (int c = 0; c < 3; ++c) {
                Vec3 e;
                e[c] = 1.0;
                const CoalgebraElement mu(g, e);
                const double via_h = dynamic_phase_pairing(mu, grid, i);
                CHECK(std::abs(via_h - pairing(mu, kd)) <= 1e-12);
            }
        }
    }
}

TEST_CASE("geometric phase: trivial grids") {
    const FloquetFactorGrid zero =
        factor_grid_of(PeriodicCurve::constant(GroupId::SO3, {}), 16, 32);
    CHECK(geometric_phase(zero, 16).norm() <= 1e-13);
    const FloquetFactorGrid constant =
        factor_grid_of(PeriodicCurve::constant(GroupId::SO3, {0.3, 0.1, -0.2}), 16, 32);
    CHECK(geometric_phase(constant, 16).norm() <= 1e-12);
    CHECK(geometric_phase(constant, 0).norm() == 0.0);
}

TEST_CASE("surface integral equals the pairing with the geometric phase") {
    for (GroupId g : {GroupId::SO3, GroupId::SL2R}) {
        const PeriodicCurve phi = rotating_field(g, 0.3, 0.4);
        const FloquetFactorGrid grid = factor_grid_of(phi, 64, 128);
        const AlgebraElement kg = geometric_phase(grid, 64);
        CHECK(std::abs(geometric_phase_surface(CoalgebraElement(g, {}), grid, 64)) == 0.0);
        for (int c = 0; c < 3; ++c) {
            Vec3 e;
            e[c] = 1.0;
            const double surf = geometric_phase_surface(CoalgebraElement(g, e), grid, 64);
            CHECK(std::abs(surf - kg.coords[c]) <= 1e-10);
        }
    }
}

TEST_CASE("split_phases: trivial and constant systems") {
    PhaseOptions opt;
    opt.n_t = 64;
    opt.n_s = 32;
    const PhaseReport zero = split_phases(PeriodicCurve::constant(GroupId::SO3, {}), opt);
    CHECK(zero.k.norm() <= 1e-13);
    CHECK(zero.k_dyn.norm() <= 1e-13);
    CHECK(zero.k_geom.norm() <= 1e-13);

    const Vec3 a{0.15, -0.3, 0.2};
    const PhaseReport c = split_phases(PeriodicCurve::constant(GroupId::SO3, a), opt);
    CHECK((c.k.coords - a * kTwoPi).norm() <= 1e-11);
    CHECK((c.k_dyn.coords - a * kTwoPi).norm() <= 1e-11);
    CHECK(c.k_geom.norm() <= 1e-11);
    CHECK(c.splitting_residual <= 1e-11);
}

TEST_CASE("split_phases on the rotating field: closed-form branch and splitting") {
    const double eps = 0.3, c = 0.4;
    PhaseOptions opt;
    opt.n_t = 256;
    opt.n_s = 256;
    const PhaseReport rep = split_phases(rotating_field(GroupId::SO3, eps, c), opt);

    // continued branch: k(1) = 2 pi (n-1)/n (eps, 0, c-1), n = |(eps,0,c-1)|
    const Vec3 u{eps, 0.0, c - 1.0};
    const double n1 = u.norm();
    const Vec3 k_expected = u * (kTwoPi * (n1 - 1.0) / n1);
    CHECK((rep.k.coords - k_expected).norm() <= 1e-7);

    CHECK(rep.splitting_residual <= 1e-6);
    CHECK(rep.splitting_residual_max <= 1e-6);
    CHECK(rep.periodicity_residual <= 1e-5);
    CHECK(rep.k_geom.norm() > 1e-3);  // genuinely nonzero geometric phase

    // the per-s sweep columns satisfy the same splitting everywhere
    for (std::size_t i = 0; i < rep.s_grid.size(); i += 32)
        CHECK(rep.splitting_of_s[i] <= 1e-6);
}

TEST_CASE("split_phases on the SL2R elliptic system") {
    PhaseOptions opt;
    opt.n_t = 256;
    opt.n_s = 256;
    const PhaseReport rep = split_phases(rotating_field(GroupId::SL2R, 0.3, 0.4), opt);
    CHECK(rep.splitting_residual <= 1e-6);
    CHECK(rep.end_monodromy.reducible);
}

TEST_CASE("dynamic phase is independent of the homotopy") {
    PhaseOptions opt;
    opt.n_t = 256;
    opt.n_s = 64;
    const PeriodicCurve phi = rotating_field(GroupId::SO3, 0.3, 0.4);
    const PhaseReport lin = split_phases(phi, opt);
    opt.homotopy = HomotopyFamily::Kind::Geodesic;
    const PhaseReport geo = split_phases(phi, opt);
    CHECK(geo.homotopy_kind == HomotopyFamily::Kind::Geodesic);
    CHECK((lin.k_dyn.coords - geo.k_dyn.coords).norm() <= 1e-6);
    CHECK((lin.k.coords - geo.k.coords).norm() <= 1e-6);
    CHECK(geo.splitting_residual <= 1e-6);
}

TEST_CASE("zero curvature: constant grid vanishes, product grid decays at 4th order") {
    const AlgebraElement a = random_algebra(GroupId::SO3, 0.6);
    const AlgebraElement b = random_algebra(GroupId::SO3, 0.8);
    auto build = [&](std::size_t rows, std::size_t cols) {
        Grid2D<GroupElement> g(rows + 1, cols + 1, GroupElement::identity(GroupId::SO3));
        for (std::size_t i = 0; i <= rows; ++i)
            for (std::size_t j = 0; j <= cols; ++j) {
                const double s = static_cast<double>(i) / static_cast<double>(rows);
                const double t =
                    kTwoPi * static_cast<double>(j) / static_cast<double>(cols);
                g(i, j) = exp_group(a * s) * exp_group(b * t);
            }
        return g;
    };
    Grid2D<GroupElement> constant(16, 16, exp_group(a));
    CHECK(zero_curvature_residual(constant, 1.0 / 16.0, 1.0 / 16.0) <= 1e-12);

    // the product grid is separable, so the discrete derivative fields keep
    // the exact curvature cancellation: the residual sits at roundoff at
    // every resolution
    CHECK(zero_curvature_residual(build(16, 32), 1.0 / 16.0, kTwoPi / 32.0) <= 1e-12);
    CHECK(zero_curvature_residual(build(64, 128), 1.0 / 64.0, kTwoPi / 128.0) <= 1e-11);
}

TEST_CASE("zero curvature residual of solved factor grids refines at 4th order") {
    const PeriodicCurve phi = rotating_field(GroupId::SO3, 0.3, 0.4);
    const double coarse = zero_curvature_residual(factor_grid_of(phi, 32, 64));
    const double fine = zero_curvature_residual(factor_grid_of(phi, 64, 128));
    const double ratio = coarse / fine;
    CHECK(ratio >= 8.0);
    CHECK(ratio <= 40.0);
}

TEST_CASE("coadjoint Euler monodromy equals exp of minus ad-star of k") {
    for (GroupId g : {GroupId::SO3, GroupId::SL2R}) {
        const PeriodicCurve phi = rotating_field(g, 0.3, 0.4);
        const HomotopyFamily fam = build_linear_homotopy(phi);
        const FamilySolution sol = solve_family(fam, 32, 512);
        std::vector<GroupElement> ms;
        for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
        const auto ks = continue_log_branch(ms);
        const GroupElement m = ms.back();
        const AlgebraElement k = ks.back();
        // matrix of -ad*_k = -(ad_k)^T acting on dual coordinates
        CoordMat neg_ad_star;
        for (int i = 0; i < 3; ++i) {
            Vec3 e;
            e[i] = 1.0;
            const Vec3 col = bracket(k, AlgebraElement(g, e)).coords;
            for (int r = 0; r < 3; ++r) neg_ad_star(i, r) = -col[r];  // transpose
        }
        const CoordMat flow = coordmat_exp(neg_ad_star);
        for (int c = 0; c < 3; ++c) {
            Vec3 e;
            e[c] = 1.0;
            const CoalgebraElement mu(g, e);
            const Vec3 lhs = coadjoint(m, mu).coords;
            const Vec3 rhs = flow * mu.coords;
            CHECK((lhs - rhs).norm() <= 1e-8);
        }
    }
}

TEST_CASE("geometric phase refuses too-coarse s grids") {
    const FloquetFactorGrid grid =
        factor_grid_of(PeriodicCurve::constant(GroupId::SO3, {0.1, 0, 0}), 4, 32);
    CHECK_THROWS_AS(geometric_phase(grid, 4), ResolutionError);
    CHECK_THROWS_AS(
        geometric_phase_surface(CoalgebraElement(GroupId::SO3, {1, 0, 0}), grid, 4),
        ResolutionError);
}
