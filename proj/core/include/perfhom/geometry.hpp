#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "perfhom/grid.hpp"

namespace perfhom {

enum class Label : std::uint8_t { exterior = 0, omega_eps = 1, hole = 2 };

/// Per-node region labels realising Omega, Omega^eps, the holes and the exterior.
class DomainMask {
public:
    DomainMask(Grid grid, std::vector<Label> labels);

    const Grid& grid() const noexcept { return grid_; }
    Label operator[](std::size_t i) const { return labels_[i]; }
    const std::vector<Label>& labels() const noexcept { return labels_; }

    bool in_omega(std::size_t i) const { return labels_[i] != Label::exterior; }
    std::size_t count(Label l) const;

    /// chi_eps: 1 on Omega^eps, 0 elsewhere.
    ScalarField chi_eps() const;
    /// chi_Omega: 1 on Omega^eps and holes.
    ScalarField chi_omega() const;
    std::vector<std::uint8_t> selector(Label l) const;
    std::vector<std::uint8_t> omega_selector() const;

    /// Non-fatal diagnostics recorded at construction (e.g. unresolved holes).
    std::vector<std::string> warnings;

private:
    Grid grid_;
    std::vector<Label> labels_;
};

struct NoHole {};
/// Ball of radius `radius_factor` (in cell units) centred in the cell.
struct BallHole {
    double radius_factor = 0.25;
};
/// Closed sub-box of the representative cell, in cell coordinates.
struct BoxHole {
    Point lower{};
    Point upper{};
};
using HoleShape = std::variant<NoHole, BallHole, BoxHole>;

/// Periodic perforation: the cell eps * (k l + Q) carries the hole image
/// c_k + eps^gamma (A - c), where c is the centre of A in Q.
struct PerforationSpec {
    std::vector<double> cell_lengths{1.0, 1.0};
    HoleShape hole = BallHole{};
    double epsilon = 0.25;
    double gamma = 1.0;
    Box omega{};
    /// Remove only holes that lie strictly inside Omega.
    bool interior_holes_only = false;

    int dim() const { return omega.dim; }
    /// |A| / |Q| for the unscaled hole.
    double hole_fraction() const;
};

DomainMask build_periodic_mask(const PerforationSpec& spec, const Grid& grid);

/// Omega = (0,1) x (-1,1); Omega^eps = {-1 < y < 0.5 (1 + sin(x / eps))}.
DomainMask build_oscillating_mask(double epsilon, const Grid& grid);
Box oscillating_omega();

/// Omega = ball of radius `outer`, Omega^eps = ball of radius `inner`, both centred at the origin.
DomainMask build_annulus_mask(double inner, double outer, const Grid& grid);

/// Omega with no holes.
DomainMask build_box_mask(const Box& omega, const Grid& grid);

enum class CoefficientRole { chi, lambda, gamma, nu };

struct CoefficientField {
    ScalarField values;
    CoefficientRole role;
};

enum class LimitRegime { full, fraction, vanishing, custom };

struct WeakLimit {
    CoefficientField chi;
    LimitRegime regime;
    /// The constant value for full/fraction/vanishing regimes.
    double constant = 0.0;
};

struct OscillatingFamily {};
using GeometryFamily = std::variant<PerforationSpec, OscillatingFamily>;

/// Closed-form weak-* limit of chi_eps for the supported families.
WeakLimit analytic_weak_limit(const GeometryFamily& family, const Grid& grid);

/// Fraction of s in (0, 2 pi) with 0.5 (1 + sin s) > y.
double oscillating_chi(double y);

/// |<chi_eps - X, phi_k>| for each test function.
std::vector<double> weak_pairing_error(const DomainMask& mask, const WeakLimit& limit,
                                       const std::vector<ScalarField>& tests);

/// Plain-text dump: a header line, then one character per node ('.' exterior,
/// 'o' Omega^eps, '#' hole). Rows run along the last axis; 3-D slices are
/// separated by blank lines.
void write_mask(std::ostream& out, const DomainMask& mask);
DomainMask read_mask(std::istream& in);

/// Same layout as write_mask with whitespace-separated values.
void write_field(std::ostream& out, const ScalarField& field);

}  // namespace perfhom
