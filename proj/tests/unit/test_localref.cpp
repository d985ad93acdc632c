#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "perfhom/errors.hpp"
#include "perfhom/localref.hpp"

namespace perfhom {
namespace {

// q11 for the centred disk of radius 1/4 at h = 1/128, frozen from a verified run.
constexpr double kFrozenDiskQ11 = 0.66892584182860226;

Box unit_box(int dim) {
    Box b;
    b.dim = dim;
    for (int a = 0; a < dim; ++a) b.upper[a] = 1.0;
    return b;
}

// Max difference over Omega nodes.
double max_error(const ScalarField& a, const ScalarField& b, const Box& omega) {
    double e = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (omega.contains(a.grid().center(i))) e = std::max(e, std::abs(a[i] - b[i]));
    }
    return e;
}

// u = sin(pi x) sin(pi y) with q = [[2, 0.5], [0.5, 1]], reaction c:
// q_ij d_i d_j u - c u = -pi^2 (3 u - cos(pi x) cos(pi y)) - c u.
TEST(LocalSolve, AnisotropicManufacturedSolution) {
    double previous = 0.0;
    for (double h : {1.0 / 32.0, 1.0 / 64.0}) {
        const Grid g = Grid::covering(unit_box(2), h, 0.0);
        LocalProblem p{build_box_mask(unit_box(2), g)};
        p.q[0][0] = 2.0;
        p.q[0][1] = p.q[1][0] = 0.5;
        p.q[1][1] = 1.0;
        p.reaction = 1.5;
        ScalarField f(g), exact(g);
        const double pi = std::numbers::pi;
        for (std::size_t i = 0; i < g.size(); ++i) {
            const Point x = g.center(i);
            const double u = std::sin(pi * x[0]) * std::sin(pi * x[1]);
            exact[i] = u;
            f[i] = -pi * pi * (3.0 * u - std::cos(pi * x[0]) * std::cos(pi * x[1])) - 1.5 * u;
        }
        const LocalSolveResult r = solve_local(p, f, SolveOptions{1e-12});
        const double e = max_error(r.v, exact, unit_box(2));
        EXPECT_LE(e, 2e-2);
        if (previous > 0.0) EXPECT_GT(previous / e, 2.5);
        previous = e;
    }
}

TEST(LocalSolve, ThreeDimensionalPoisson) {
    const Grid g = Grid::covering(unit_box(3), 1.0 / 16.0, 0.0);
    const LocalProblem p{build_box_mask(unit_box(3), g)};
    const double pi = std::numbers::pi;
    ScalarField f(g), exact(g);
    for (std::size_t i = 0; i < g.size(); ++i) {
        const Point x = g.center(i);
        exact[i] = std::sin(pi * x[0]) * std::sin(pi * x[1]) * std::sin(pi * x[2]);
        f[i] = -3.0 * pi * pi * exact[i];
    }
    EXPECT_LE(max_error(solve_local(p, f, SolveOptions{1e-12}).v, exact, unit_box(3)), 5e-3);
}

TEST(LocalSolve, ResidualMatchesApply) {
    PerforationSpec s;
    s.omega = unit_box(2);
    const Grid g = Grid::covering(s.omega, 1.0 / 32.0, 0.0);
    const LocalProblem p{build_periodic_mask(s, g), HoleCondition::dirichlet, 0.5};
    ScalarField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = p.mask[i] == Label::omega_eps ? 1.0 : 0.0;
    const LocalSolveResult r = solve_local(p, f, SolveOptions{1e-12});
    const ScalarField lv = apply_local(p, r.v);
    EXPECT_LE(l2_norm(lv - f), 1e-10 * l2_norm(f));
}

TEST(LocalSolve, NeumannHolesSolveAboveDirichlet) {
    // With f = -1, both solutions are positive and mirror faces let v grow.
    PerforationSpec s;
    s.omega = unit_box(2);
    const Grid g = Grid::covering(s.omega, 1.0 / 32.0, 0.0);
    const DomainMask m = build_periodic_mask(s, g);
    ScalarField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = m[i] == Label::omega_eps ? -1.0 : 0.0;
    const auto d = solve_local(LocalProblem{m, HoleCondition::dirichlet}, f, SolveOptions{1e-12}).v;
    const auto n = solve_local(LocalProblem{m, HoleCondition::neumann}, f, SolveOptions{1e-12}).v;
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_GE(n[i], d[i] - 1e-12);
}

TEST(LocalProblemValidation, RejectsNonSymmetricOrIndefiniteQ) {
    const Grid g = Grid::covering(unit_box(2), 1.0 / 8.0, 0.0);
    LocalProblem p{build_box_mask(unit_box(2), g)};
    p.q[0][1] = 0.3;
    const ScalarField f(g, 0.0);
    EXPECT_THROW(solve_local(p, f), validation_error);
    p.q[1][0] = 0.3;
    p.q[1][1] = -1.0;
    EXPECT_THROW(solve_local(p, f), validation_error);
}

TEST(LocalProblemValidation, RejectsCrossTermsWithNeumannHoles) {
    PerforationSpec s;
    s.omega = unit_box(2);
    const Grid g = Grid::covering(s.omega, 1.0 / 16.0, 0.0);
    LocalProblem p{build_periodic_mask(s, g), HoleCondition::neumann};
    p.q[0][1] = p.q[1][0] = 0.2;
    EXPECT_THROW(solve_local(p, ScalarField(g)), validation_error);
}

TEST(CellProblem, EmptyCellIsIdentity) {
    const CellSolution c = homogenized_coefficients(CellGeometry{{1.0, 1.0, 1.0}, NoHole{}}, 1.0 / 8.0);
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 3; ++j) EXPECT_EQ(c.q[i][j], i == j ? 1.0 : 0.0);
    }
    EXPECT_EQ(c.material_fraction, 1.0);
}

TEST(CellProblem, CentredSquareHole) {
    const CellSolution c =
        homogenized_coefficients(CellGeometry{{1.0, 1.0}, BoxHole{{0.25, 0.25, 0.0}, {0.75, 0.75, 0.0}}}, 1.0 / 32.0);
    EXPECT_NEAR(c.q[0][0], c.q[1][1], 1e-10);
    EXPECT_LT(c.q[0][0], c.material_fraction);
    EXPECT_GT(c.q[0][0], 0.0);
    EXPECT_NEAR(c.material_fraction, 0.75, 1e-15);
}

TEST(CellProblem, HoleTouchingBoundaryRejected) {
    EXPECT_THROW(homogenized_coefficients(CellGeometry{{1.0, 1.0}, BoxHole{{0.0, 0.25, 0.0}, {1.0, 0.75, 0.0}}},
                                          1.0 / 16.0),
                 validation_error);
}

TEST(CellProblem, DiskRegression) {
    const CellSolution c = homogenized_coefficients(CellGeometry{{1.0, 1.0}, BallHole{0.25}}, 1.0 / 128.0);
    EXPECT_NEAR(c.q[0][0], kFrozenDiskQ11, 1e-9);
    EXPECT_NEAR(c.q[0][0], c.q[1][1], 1e-10);
    EXPECT_NEAR(c.q[0][1], 0.0, 1e-10);
}

TEST(CellProblem, ConvergesUnderRefinement) {
    double prev = 0.0, prev_diff = 0.0;
    for (double h : {1.0 / 32.0, 1.0 / 64.0, 1.0 / 128.0}) {
        const double q = homogenized_coefficients(CellGeometry{{1.0, 1.0}, BallHole{0.25}}, h).q[0][0];
        if (prev > 0.0) {
            const double diff = std::abs(q - prev);
            if (prev_diff > 0.0) EXPECT_LT(diff, prev_diff);
            prev_diff = diff;
        }
        prev = q;
    }
}

TEST(Mu, ThreeDimensionalConstant) {
    EXPECT_NEAR(mu_constant(3, 1.0), std::numbers::pi / 2.0, 1e-14);
    EXPECT_THROW(mu_constant(2, 1.0), validation_error);
}

}  // namespace
}  // namespace perfhom
