#include <gtest/gtest.h>

#include "perfhom/errors.hpp"
#include "perfhom/grid.hpp"

namespace perfhom {
namespace {

TEST(Grid, CellCentredNodes) {
    const Grid g(2, Point{0.0, 0.0, 0.0}, 0.25, {4, 4, 1});
    EXPECT_EQ(g.size(), 16u);
    EXPECT_DOUBLE_EQ(g.center(0)[0], 0.125);
    EXPECT_DOUBLE_EQ(g.center(Index{3, 1, 0})[1], 0.375);
    EXPECT_DOUBLE_EQ(g.cell_volume(), 0.0625);
}

TEST(Grid, RavelRoundTrip) {
    const Grid g(3, Point{}, 0.5, {3, 4, 5});
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_EQ(g.ravel(g.unravel(i)), i);
    // Axis 0 varies slowest.
    EXPECT_EQ(g.ravel(Index{1, 0, 0}), 20u);
    EXPECT_EQ(g.ravel(Index{0, 0, 1}), 1u);
}

TEST(Grid, CoveringAlignsWithBoxAndPads) {
    Box b;
    b.dim = 2;
    b.upper = {1.0, 2.0, 0.0};
    const Grid g = Grid::covering(b, 0.25, 0.3);
    // 0.3 rounds up to two cells, plus one cell so exterior nodes surround the box.
    EXPECT_EQ(g.extent(0), 4 + 2 * 3);
    EXPECT_EQ(g.extent(1), 8 + 2 * 3);
    EXPECT_DOUBLE_EQ(g.origin()[0], -0.75);
}

TEST(ScalarField, InnerProductUsesCellVolume) {
    const Grid g(1, Point{}, 0.1, {10, 1, 1});
    const ScalarField one(g, 1.0);
    EXPECT_NEAR(inner_product(one, one), 1.0, 1e-15);
    EXPECT_NEAR(l2_norm(ScalarField(g, 2.0)), 2.0, 1e-15);
}

TEST(ScalarField, MismatchedGridsThrow) {
    const Grid a(1, Point{}, 0.1, {10, 1, 1});
    const Grid b(1, Point{}, 0.2, {10, 1, 1});
    EXPECT_THROW(inner_product(ScalarField(a), ScalarField(b)), shape_error);
}

TEST(ScalarField, RestrictZeroesOutside) {
    const Grid g(1, Point{}, 1.0, {4, 1, 1});
    const ScalarField f(g, 3.0);
    const std::vector<std::uint8_t> keep{1, 0, 1, 0};
    const ScalarField r = restrict_field(f, keep);
    EXPECT_EQ(r[0], 3.0);
    EXPECT_EQ(r[1], 0.0);
}

}  // namespace
}  // namespace perfhom
