#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "liefloq/floquet.hpp"
#include "test_helpers.hpp"

using namespace liefloq;
using testutil::random_algebra;

namespace {

PeriodicCurve rotating_field(GroupId g, double eps, double c) {
    return PeriodicCurve::fourier(g, {{{0.0, eps}, {0.0, 0.0}, {c}}},
                                  {{{}, {0.0, eps}, {}}});
}

HomotopyFamily linear_family(const PeriodicCurve& phi) {
    HomotopyFamily fam;
    fam.kind = HomotopyFamily::Kind::LinearScale;
    fam.group = phi.group();
    fam.base_curve = phi;
    fam.make_curve = [phi](double s) { return phi.scaled(s); };
    fam.period_at = [p = phi.period()](double) { return p; };
    fam.initial_log = AlgebraElement::zero(phi.group());
    return fam;
}

// Two-segment SL(2,R) system: exp over the first half is -I (elliptic),
// over the second half diag(e^{pi b}, e^{-pi b}) (hyperbolic), so the
// monodromy is -diag(e^{pi b}, e^{-pi b}) with trace below -2.
PeriodicCurve sl2_center_times_hyperbolic(double b) {
    const AlgebraElement rot(GroupId::SL2R, {0, 0, 2});       // matrix [[0,1],[-1,0]]
    const AlgebraElement hyp(GroupId::SL2R, {2.0 * b, 0, 0}); // matrix b*diag(1,-1)
    return PeriodicCurve::piecewise(GroupId::SL2R,
                                    {{0.0, M_PI, rot}, {M_PI, kTwoPi, hyp}});
}

}  // namespace

TEST_CASE("monodromy of the trivial system") {
    const FundamentalSolution f =
        solve_fundamental(PeriodicCurve::constant(GroupId::SO3, {}), 16);
    const MonodromyReport rep = monodromy(f);
    CHECK(rep.reducible);
    CHECK(rep.log.status == LogStatus::Unique);
    CHECK(rep.log.principal.norm() <= 1e-13);
}

TEST_CASE("random SO3 systems are always reducible") {
    for (int rep = 0; rep < 5; ++rep) {
        const Vec3 a = testutil::random_vec(0.8);
        const Vec3 b = testutil::random_vec(0.8);
        const PeriodicCurve phi = PeriodicCurve::fourier(
            GroupId::SO3, {{{a.x, b.x}, {a.y}, {a.z}}}, {{{}, {0.0, b.y}, {0.0, b.z}}});
        const MonodromyReport mr = monodromy(solve_fundamental(phi, 256));
        CHECK(mr.reducible);
        CHECK(mr.adjoint_reducible);
    }
}

TEST_CASE("SL2R center-times-hyperbolic system: irreducible, Euler-reducible") {
    const double b = 0.3;
    const PeriodicCurve phi = sl2_center_times_hyperbolic(b);
    const FundamentalSolution f = solve_fundamental(phi, 512);

    // exact closed-form oracle
    Mat expect(2);
    expect(0, 0) = -std::exp(M_PI * b);
    expect(1, 1) = -std::exp(-M_PI * b);
    CHECK(frobenius_distance(f.monodromy_candidate().matrix, expect) <= 1e-12);

    const MonodromyReport mr = monodromy(f);
    CHECK_FALSE(mr.reducible);
    CHECK(mr.log.status == LogStatus::NotInImage);
    CHECK(mr.adjoint_reducible);
    CHECK((mr.adjoint_log_coords - Vec3{2.0 * M_PI * b, 0, 0}).norm() <= 1e-10);
    REQUIRE(mr.log.has_center_factor);
    CHECK(frobenius_distance(mr.log.center_factor.matrix, Mat::identity(2) * -1.0) <=
          1e-14);
}

TEST_CASE("branch continuation follows a growing rotation past angle pi") {
    const double rate = 1.3;
    std::vector<GroupElement> ms;
    const std::size_t n = 32;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n);
        ms.push_back(exp_group(AlgebraElement(GroupId::SO3, {0, 0, kTwoPi * s * rate})));
    }
    const auto ks = continue_log_branch(ms);
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n);
        CHECK((ks[i].coords - Vec3{0, 0, kTwoPi * s * rate}).norm() <= 1e-12);
    }
}

TEST_CASE("continuation trivia: identity list and constant-coefficient family") {
    std::vector<GroupElement> ids(12, GroupElement::identity(GroupId::SO3));
    for (const auto& k : continue_log_branch(ids)) CHECK(k.norm() <= 1e-13);

    const AlgebraElement a = random_algebra(GroupId::SO3, 0.4);
    std::vector<GroupElement> ms;
    const std::size_t n = 16;
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n);
        ms.push_back(exp_group(a * (kTwoPi * s)));
    }
    const auto ks = continue_log_branch(ms);
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n);
        CHECK((ks[i].coords - a.coords * (kTwoPi * s)).norm() <= 1e-10);
    }
}

TEST_CASE("continuation reports reducibility loss with the offending s") {
    // path from I to -I (elliptic), then drifting hyperbolic: trace < -2
    std::vector<GroupElement> ms;
    const std::size_t n = 50;
    const AlgebraElement rot(GroupId::SL2R, {0, 0, 2});
    const AlgebraElement hyp(GroupId::SL2R, {1.0, 0, 0});
    for (std::size_t i = 0; i <= n; ++i) {
        const double s = static_cast<double>(i) / static_cast<double>(n);
        if (s <= 0.5) {
            ms.push_back(exp_group(rot * (2.0 * s * M_PI)));
        } else {
            const GroupElement h = exp_group(hyp * (s - 0.5));
            ms.push_back(GroupElement(GroupId::SL2R, h.matrix * -1.0));
        }
    }
    try {
        continue_log_branch(ms);
        FAIL("expected UniformReducibilityViolated");
    } catch (const UniformReducibilityViolated& e) {
        CHECK(e.s > 0.5);
    }
}

TEST_CASE("family of the irreducible system reports where the image is left") {
    // scaling the center-times-hyperbolic system down to zero: the trace of
    // m(s) crosses -2 on the way, and the continued log diverges before it
    const PeriodicCurve phi = sl2_center_times_hyperbolic(0.3);
    const FamilySolution sol = solve_family(linear_family(phi), 128, 256);
    std::vector<GroupElement> ms;
    for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
    try {
        continue_log_branch(ms);
        FAIL("expected UniformReducibilityViolated");
    } catch (const UniformReducibilityViolated& e) {
        CHECK(e.s > 0.5);
        CHECK(e.s < 1.0);
        // the reported node really is outside the image
        const std::size_t idx = static_cast<std::size_t>(std::llround(e.s * 128.0));
        CHECK_FALSE(log_group(ms[idx]).in_exp_image());
    }
}

TEST_CASE("continuation rejects jumps beyond the threshold") {
    std::vector<GroupElement> ms{GroupElement::identity(GroupId::SO3),
                                 exp_group(AlgebraElement(GroupId::SO3, {0, 0, 2.0}))};
    CHECK_THROWS_AS(continue_log_branch(ms), BranchAmbiguity);
}

TEST_CASE("SL2R elliptic family: continued branch matches the closed form") {
    const double eps = 0.3, c = 0.4;
    const PeriodicCurve phi = rotating_field(GroupId::SL2R, eps, c);
    const FamilySolution sol = solve_family(linear_family(phi), 64, 512);
    std::vector<GroupElement> ms;
    for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
    const auto ks = continue_log_branch(ms);
    for (std::size_t i = 0; i < ms.size(); ++i) {
        const double s = sol.s_grid[i];
        const Vec3 u{s * eps, 0.0, s * c - 1.0};
        // matrix rotation rate of u_s is q; the continued branch is
        // k(s) = (omega_s - pi) u_s / q with omega_s = 2 pi q.
        const double q = 0.5 * std::sqrt((s * c - 1.0) * (s * c - 1.0) - s * s * eps * eps);
        const double omega = kTwoPi * q;
        const Vec3 k_closed = u * ((omega - M_PI) / q);
        CHECK((ks[i].coords - k_closed).norm() <= 2e-7);
    }
}

TEST_CASE("branch continuation is stable under s refinement") {
    const PeriodicCurve phi = rotating_field(GroupId::SO3, 0.3, 0.4);
    auto k_end = [&](std::size_t n_s) {
        const FamilySolution sol = solve_family(linear_family(phi), n_s, 256);
        std::vector<GroupElement> ms;
        for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
        return continue_log_branch(ms).back();
    };
    const AlgebraElement coarse = k_end(32);
    const AlgebraElement fine = k_end(64);
    CHECK((coarse.coords - fine.coords).norm() <= 1e-10);
}

TEST_CASE("factor grid: constant family has identity factor") {
    const Vec3 a{0.2, -0.5, 0.9};
    const PeriodicCurve phi = PeriodicCurve::constant(GroupId::SO3, a);
    const FamilySolution sol = solve_family(linear_family(phi), 32, 32);
    std::vector<GroupElement> ms;
    for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
    const auto ks = continue_log_branch(ms);
    const FloquetFactorGrid grid = floquet_factor(sol, ks);
    for (std::size_t i = 0; i <= grid.n_s(); ++i)
        for (std::size_t j = 0; j <= grid.n_t(); ++j)
            CHECK(frobenius_distance(grid.p_values(i, j).matrix, Mat::identity(3)) <=
                  1e-12);
    CHECK(grid.periodicity_residual <= 1e-12);
}

TEST_CASE("factor grid on the rotating field: periodicity and reconstruction") {
    const PeriodicCurve phi = rotating_field(GroupId::SO3, 0.3, 0.4);
    const FamilySolution sol = solve_family(linear_family(phi), 8, 1024);
    std::vector<GroupElement> ms;
    for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
    const auto ks = continue_log_branch(ms);
    const FloquetFactorGrid grid = floquet_factor(sol, ks);

    CHECK(grid.periodicity_residual <= 1e-8);
    // s = 0 row is the identity
    for (std::size_t j = 0; j <= grid.n_t(); ++j)
        CHECK(frobenius_distance(grid.p_values(0, j).matrix, Mat::identity(3)) <= 1e-12);
    // exp(k(1)) reproduces m(1)
    CHECK(frobenius_distance(exp_group(ks.back()).matrix, ms.back().matrix) <= 1e-8);
    // algebraic reconstruction p exp(t k / 2 pi) = f at every node
    for (std::size_t i = 0; i <= grid.n_s(); ++i)
        for (std::size_t j = 0; j <= grid.n_t(); j += 128) {
            const double frac =
                static_cast<double>(j) / static_cast<double>(grid.n_t());
            const GroupElement recon = grid.p_values(i, j) * exp_group(ks[i] * frac);
            CHECK(frobenius_distance(recon.matrix, sol.rows[i].values[j].matrix) <= 1e-10);
        }
}

TEST_CASE("mismatched k(s) triggers a factorization error") {
    const PeriodicCurve phi = rotating_field(GroupId::SO3, 0.3, 0.4);
    const FamilySolution sol = solve_family(linear_family(phi), 8, 256);
    std::vector<GroupElement> ms;
    for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
    auto ks = continue_log_branch(ms);
    ks.back() = ks.back() + AlgebraElement(GroupId::SO3, {0.3, 0, 0});
    CHECK_THROWS_AS(floquet_factor(sol, ks), FactorizationError);
}

TEST_CASE("analytic factor derivative: trivial cases and stencil cross-check") {
    // constant family: p is the identity, D_t p = 0
    const PeriodicCurve cphi = PeriodicCurve::constant(GroupId::SO3, {0.1, 0.7, -0.3});
    const FamilySolution csol = solve_family(linear_family(cphi), 16, 64);
    std::vector<GroupElement> cms;
    for (const auto& row : csol.rows) cms.push_back(row.monodromy_candidate());
    const FloquetFactorGrid cgrid = floquet_factor(csol, continue_log_branch(cms));
    for (std::size_t j = 0; j <= cgrid.n_t(); j += 16)
        CHECK(analytic_dt_p(cgrid, 5, j).norm() <= 1e-11);
    CHECK(analytic_dt_p(cgrid, 0, 7).norm() <= 1e-12);  // s = 0 row

    const PeriodicCurve phi = rotating_field(GroupId::SO3, 0.3, 0.4);
    const FamilySolution sol = solve_family(linear_family(phi), 8, 1024);
    std::vector<GroupElement> ms;
    for (const auto& row : sol.rows) ms.push_back(row.monodromy_candidate());
    const FloquetFactorGrid grid = floquet_factor(sol, continue_log_branch(ms));
    const std::size_t i = 6;
    std::vector<GroupElement> p_row;
    for (std::size_t j = 0; j <= grid.n_t(); ++j) p_row.push_back(grid.p_values(i, j));
    const double h = grid.periods[i] / static_cast<double>(grid.n_t());
    for (std::size_t j : {50u, 300u, 777u}) {
        const AlgebraElement numeric = d_operator(p_row, h, j);
        const AlgebraElement analytic = analytic_dt_p(grid, i, j);
        CHECK((numeric.coords - analytic.coords).norm() <= 1e-8);
    }
}

TEST_CASE("two branches inside the jump window raise an ambiguity") {
    // rotation by pi with no prior: both +-pi axes are equally close
    std::vector<GroupElement> ms{
        GroupElement::identity(GroupId::SO3),
        exp_group(AlgebraElement(GroupId::SO3, {0, 0, M_PI}))};
    ContinuationOptions opts;
    opts.branch_jump = 4.0;
    try {
        continue_log_branch(ms, opts);
        FAIL("expected BranchAmbiguity");
    } catch (const BranchAmbiguity& e) {
        CHECK(std::string(e.what()).find("two log branches") != std::string::npos);
    }
}
