#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace perfhom {

inline constexpr int kMaxDim = 3;

/// Physical coordinates; entries past the grid dimension are zero.
using Point = std::array<double, kMaxDim>;
/// Integer lattice coordinates; entries past the grid dimension are zero.
using Index = std::array<long, kMaxDim>;

/// Axis-aligned open box, used for Omega and for representative cells.
struct Box {
    int dim = 2;
    Point lower{};
    Point upper{};

    bool contains(const Point& p) const;
    double volume() const;
};

/// Uniform cell-centred lattice.
///
/// Node k (per axis) sits at origin + (k + 1/2) h, so the lattice covers the
/// box [origin, origin + extents * h]. Linear indices are row-major with axis 0
/// varying slowest.
class Grid {
public:
    Grid(int dim, Point origin, double spacing, std::array<long, kMaxDim> extents);

    /// Lattice whose cell faces align with the faces of `box`, padded on every
    /// side by `margin` rounded up to whole cells, plus one cell.
    static Grid covering(const Box& box, double spacing, double margin);

    int dim() const noexcept { return dim_; }
    double spacing() const noexcept { return spacing_; }
    const Point& origin() const noexcept { return origin_; }
    long extent(int axis) const { return extents_[static_cast<std::size_t>(axis)]; }
    const std::array<long, kMaxDim>& extents() const noexcept { return extents_; }
    std::size_t size() const noexcept { return size_; }
    /// h^N, the quadrature weight of one node.
    double cell_volume() const noexcept { return cell_volume_; }

    Point center(std::size_t linear) const;
    Point center(const Index& idx) const;
    Index unravel(std::size_t linear) const;
    std::size_t ravel(const Index& idx) const;
    bool in_bounds(const Index& idx) const;
    /// Row-major strides in the same axis order as extents().
    std::array<long, kMaxDim> strides() const;

    bool operator==(const Grid& other) const;

private:
    int dim_;
    Point origin_;
    double spacing_;
    std::array<long, kMaxDim> extents_;
    std::size_t size_;
    double cell_volume_;
};

/// One real value per node of a grid (including exterior nodes).
class ScalarField {
public:
    explicit ScalarField(Grid grid, double value = 0.0);
    ScalarField(Grid grid, std::vector<double> values);

    /// Samples `fn` at every node centre.
    static ScalarField from_function(const Grid& grid, const std::function<double(const Point&)>& fn);

    const Grid& grid() const noexcept { return grid_; }
    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    double& operator[](std::size_t i) { return values_[i]; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);

    bool all_finite() const;

private:
    Grid grid_;
    std::vector<double> values_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Throws shape_error unless both fields live on the same grid.
void require_same_grid(const Grid& a, const Grid& b, const char* where);

/// h^N * sum_nodes a*b. Summation is sequential in linear-index order.
double inner_product(const ScalarField& a, const ScalarField& b);
double l2_norm(const ScalarField& a);

/// Copy of `a` with every node outside `keep` set to zero (extension by zero).
ScalarField restrict_field(const ScalarField& a, std::span<const std::uint8_t> keep);
ScalarField restrict_field(const ScalarField& a, const std::function<bool(std::size_t)>& keep);

}  // namespace perfhom
