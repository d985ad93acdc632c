#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "perfhom/errors.hpp"
#include "perfhom/experiments.hpp"

namespace perfhom {
namespace {

Box unit_square() {
    Box b;
    b.dim = 2;
    b.upper = {1.0, 1.0, 0.0};
    return b;
}

TEST(Verdict, Thresholds) {
    EXPECT_TRUE(classify_distance(0.0, 1e-10));
    EXPECT_TRUE(classify_distance(5e-10, 1e-10));
    EXPECT_FALSE(classify_distance(0.05, 1e-10));
    EXPECT_THROW(classify_distance(1e-3, 1e-10), verdict_gap_error);
}

TEST(Regime, NamesRoundTrip) {
    for (Regime r : {Regime::ll_b, Regime::eq_b, Regime::between_a_b, Regime::eq_a, Regime::ll_a}) {
        EXPECT_EQ(parse_regime(to_string(r)), r);
    }
    EXPECT_THROW(parse_regime("huge"), validation_error);
}

IteratedLimitConfig small_config() {
    IteratedLimitConfig cfg;
    cfg.nodes = 15;
    cfg.cell_spacing = 1.0 / 32.0;
    return cfg;
}

TEST(IteratedLimits, DirichletCaseTable) {
    const IteratedLimitConfig cfg = small_config();
    EXPECT_TRUE(iterated_limit_dirichlet(Regime::eq_b, cfg).equal);
    EXPECT_FALSE(iterated_limit_dirichlet(Regime::between_a_b, cfg).equal);
    EXPECT_TRUE(iterated_limit_dirichlet(Regime::ll_a, cfg).equal);
    EXPECT_THROW(iterated_limit_dirichlet(Regime::ll_b, cfg), validation_error);
}

TEST(IteratedLimits, CaseThreeNeedsThreeDimensions) {
    EXPECT_THROW(iterated_limit_dirichlet(Regime::eq_a, small_config()), validation_error);
    IteratedLimitConfig cfg = small_config();
    cfg.dim = 3;
    cfg.nodes = 7;
    const CaseVerdict v = iterated_limit_dirichlet(Regime::eq_a, cfg);
    EXPECT_NEAR(v.mu, std::numbers::pi / 2.0, 1e-14);
    EXPECT_FALSE(v.equal);
    // The reaction term shrinks the solution.
    EXPECT_LT(v.v_norm, v.w_norm);
}

TEST(IteratedLimits, NeumannCaseTable) {
    const IteratedLimitConfig cfg = small_config();
    const CaseVerdict one = iterated_limit_neumann(Regime::eq_b, cfg);
    EXPECT_FALSE(one.equal);
    EXPECT_TRUE(one.predicted_equal == one.equal);
    EXPECT_LT(one.material_fraction, 1.0);
    EXPECT_TRUE(iterated_limit_neumann(Regime::ll_b, cfg).equal);
    EXPECT_THROW(iterated_limit_neumann(Regime::ll_a, cfg), validation_error);
}

TEST(DeltaSweep, RejectsUnderresolvedDelta) {
    const Grid g = Grid::covering(unit_square(), 1.0 / 16.0, 0.4);
    const DomainMask m = build_box_mask(unit_square(), g);
    DeltaSweepConfig cfg{m, Profile::bump, BoundaryCondition::dirichlet_holes, {0.4, 0.1}, ScalarField(g),
                         LocalProblem{m}, SolveOptions{}};
    EXPECT_THROW(delta_localization_sweep(cfg), validation_error);
}

TEST(DeltaSweep, RowsCarryDiagnostics) {
    const double h = 1.0 / 32.0;
    const Grid g = Grid::covering(unit_square(), h, 0.4);
    const DomainMask m = build_box_mask(unit_square(), g);
    ScalarField f(g);
    for (std::size_t i = 0; i < g.size(); ++i) f[i] = m.in_omega(i) ? -1.0 : 0.0;
    DeltaSweepConfig cfg{m, Profile::bump, BoundaryCondition::dirichlet_holes, {0.4, 0.2}, f, LocalProblem{m},
                         SolveOptions{1e-10}};
    const auto rows = delta_localization_sweep(cfg);
    ASSERT_EQ(rows.size(), 2u);
    for (const auto& r : rows) {
        ASSERT_TRUE(r.ok()) << r.error;
        EXPECT_GT(r.get("reference_norm"), 0.0);
    }
    EXPECT_LT(rows[1].get("error_l2"), rows[0].get("error_l2"));
}

TEST(CriticalSweep, NuColumn) {
    CriticalSweepConfig cfg;
    cfg.kernel = make_kernel(2, Profile::bump);
    cfg.epsilons = {0.5, 0.25};
    const auto rows = nonlocal_critical_sweep(cfg);
    ASSERT_EQ(rows.size(), 2u);
    ASSERT_TRUE(rows[0].ok()) << rows[0].error;
    const double chi = 1.0 - std::numbers::pi / 16.0;
    EXPECT_NEAR(rows[0].get("chi_limit"), chi, 1e-15);
    EXPECT_NEAR(rows[0].get("nu"), (1.0 - chi) / chi, 1e-15);
}

}  // namespace
}  // namespace perfhom
