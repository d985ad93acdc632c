#include "perfhom/grid.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include "perfhom/errors.hpp"

namespace perfhom {

bool Box::contains(const Point& p) const {
    for (int a = 0; a < dim; ++a) {
        if (!(p[a] > lower[a] && p[a] < upper[a])) return false;
    }
    return true;
}

double Box::volume() const {
    double v = 1.0;
    for (int a = 0; a < dim; ++a) v *= upper[a] - lower[a];
    return v;
}

Grid::Grid(int dim, Point origin, double spacing, std::array<long, kMaxDim> extents)
    : dim_(dim), origin_(origin), spacing_(spacing), extents_(extents) {
    if (dim < 1 || dim > kMaxDim) throw validation_error("grid dimension must be in [1, 3]");
    if (!(spacing > 0.0) || !std::isfinite(spacing)) throw validation_error("grid spacing must be positive");
    size_ = 1;
    for (int a = 0; a < kMaxDim; ++a) {
        if (a < dim) {
            if (extents_[a] < 2) throw validation_error("every grid extent must be at least 2");
            size_ *= static_cast<std::size_t>(extents_[a]);
        } else {
            extents_[a] = 1;
            origin_[a] = 0.0;
        }
    }
    cell_volume_ = std::pow(spacing_, dim_);
}

Grid Grid::covering(const Box& box, double spacing, double margin) {
    const long pad = static_cast<long>(std::ceil(margin / spacing - 1e-9)) + 1;
    Point origin{};
    std::array<long, kMaxDim> extents{1, 1, 1};
    for (int a = 0; a < box.dim; ++a) {
        const double cells = (box.upper[a] - box.lower[a]) / spacing;
        const long n = static_cast<long>(std::llround(cells));
        if (std::abs(cells - static_cast<double>(n)) > 1e-6) {
            throw validation_error("box edge lengths must be integer multiples of the grid spacing");
        }
        origin[a] = box.lower[a] - static_cast<double>(pad) * spacing;
        extents[a] = n + 2 * pad;
    }
    return Grid(box.dim, origin, spacing, extents);
}

Point Grid::center(std::size_t linear) const { return center(unravel(linear)); }

Point Grid::center(const Index& idx) const {
    Point p{};
    for (int a = 0; a < dim_; ++a) p[a] = origin_[a] + (static_cast<double>(idx[a]) + 0.5) * spacing_;
    return p;
}

Index Grid::unravel(std::size_t linear) const {
    Index idx{};
    for (int a = kMaxDim - 1; a >= 0; --a) {
        const auto n = static_cast<std::size_t>(extents_[a]);
        idx[a] = static_cast<long>(linear % n);
        linear /= n;
    }
    return idx;
}

std::size_t Grid::ravel(const Index& idx) const {
    std::size_t linear = 0;
    for (int a = 0; a < kMaxDim; ++a) linear = linear * static_cast<std::size_t>(extents_[a]) + static_cast<std::size_t>(idx[a]);
    return linear;
}

bool Grid::in_bounds(const Index& idx) const {
    for (int a = 0; a < kMaxDim; ++a) {
        if (idx[a] < 0 || idx[a] >= extents_[a]) return false;
    }
    return true;
}

std::array<long, kMaxDim> Grid::strides() const {
    std::array<long, kMaxDim> s{};
    long acc = 1;
    for (int a = kMaxDim - 1; a >= 0; --a) {
        s[a] = acc;
        acc *= extents_[a];
    }
    return s;
}

bool Grid::operator==(const Grid& other) const {
    return dim_ == other.dim_ && spacing_ == other.spacing_ && origin_ == other.origin_
           && extents_ == other.extents_;
}

ScalarField::ScalarField(Grid grid, double value) : grid_(std::move(grid)), values_(grid_.size(), value) {}

ScalarField::ScalarField(Grid grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
    if (values_.size() != grid_.size()) throw shape_error("field value count does not match grid size");
}

ScalarField ScalarField::from_function(const Grid& grid, const std::function<double(const Point&)>& fn) {
    ScalarField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) f.values_[i] = fn(grid.center(i));
    return f;
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field addition");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(grid_, other.grid_, "field subtraction");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) v *= s;
    return *this;
}

bool ScalarField::all_finite() const {
    for (double v : values_) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

void require_same_grid(const Grid& a, const Grid& b, const char* where) {
    if (!(a == b)) throw shape_error(std::string(where) + ": operands live on different grids");
}

double inner_product(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid(), b.grid(), "inner_product");
    const auto av = a.values();
    const auto bv = b.values();
    double sum = 0.0;
    for (std::size_t i = 0; i < av.size(); ++i) sum += av[i] * bv[i];
    return a.grid().cell_volume() * sum;
}

double l2_norm(const ScalarField& a) { return std::sqrt(inner_product(a, a)); }

ScalarField restrict_field(const ScalarField& a, std::span<const std::uint8_t> keep) {
    if (keep.size() != a.size()) throw shape_error("restrict_field: mask size does not match field");
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = keep[i] ? a[i] : 0.0;
    return out;
}

ScalarField restrict_field(const ScalarField& a, const std::function<bool(std::size_t)>& keep) {
    ScalarField out(a.grid());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = keep(i) ? a[i] : 0.0;
    return out;
}

}  // namespace perfhom
