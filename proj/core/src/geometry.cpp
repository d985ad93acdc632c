#include "perfhom/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "perfhom/errors.hpp"
#include "perfhom/kernel.hpp"

namespace perfhom {
namespace {

char label_char(Label l) {
    switch (l) {
        case Label::exterior: return '.';
        case Label::omega_eps: return 'o';
        case Label::hole: return '#';
    }
    return '?';
}

Label char_label(char c) {
    switch (c) {
        case '.': return Label::exterior;
        case 'o': return Label::omega_eps;
        case '#': return Label::hole;
        default: throw validation_error(std::string("invalid mask character '") + c + "'");
    }
}

// Geometry of one scaled hole image relative to its cell centre, in cell units.
struct ScaledHole {
    bool present = false;
    bool ball = false;
    double radius = 0.0;      // ball
    Point half_width{};       // box
    Point centre{};           // centre of A inside Q
};

ScaledHole scaled_hole(const PerforationSpec& spec) {
    ScaledHole h;
    const int dim = spec.dim();
    const double scale = std::pow(spec.epsilon, spec.gamma - 1.0);
    if (const auto* ball = std::get_if<BallHole>(&spec.hole)) {
        h.present = true;
        h.ball = true;
        h.radius = ball->radius_factor * scale;
        double min_len = spec.cell_lengths[0];
        for (int a = 0; a < dim; ++a) {
            h.centre[a] = 0.5 * spec.cell_lengths[a];
            min_len = std::min(min_len, spec.cell_lengths[a]);
        }
        if (!(ball->radius_factor > 0.0)) throw validation_error("ball hole radius factor must be positive");
        if (h.radius >= 0.5 * min_len) {
            throw validation_error("scaled hole radius " + std::to_string(h.radius)
                                   + " reaches half the cell: holes would merge");
        }
    } else if (const auto* box = std::get_if<BoxHole>(&spec.hole)) {
        h.present = true;
        for (int a = 0; a < dim; ++a) {
            if (!(box->upper[a] > box->lower[a])) throw validation_error("box hole must have positive extent");
            h.centre[a] = 0.5 * (box->lower[a] + box->upper[a]);
            h.half_width[a] = 0.5 * (box->upper[a] - box->lower[a]) * scale;
            if (h.centre[a] - h.half_width[a] < -1e-12
                || h.centre[a] + h.half_width[a] > spec.cell_lengths[a] + 1e-12) {
                throw validation_error("scaled box hole does not fit inside the cell");
            }
        }
    }
    return h;
}

void validate_spec(const PerforationSpec& spec) {
    const int dim = spec.dim();
    if (dim < 1 || dim > kMaxDim) throw validation_error("perforation dimension must be in [1, 3]");
    if (static_cast<int>(spec.cell_lengths.size()) != dim) {
        throw validation_error("cell_lengths must have one entry per dimension");
    }
    for (double l : spec.cell_lengths) {
        if (!(l > 0.0)) throw validation_error("cell lengths must be positive");
    }
    if (!(spec.epsilon > 0.0) || spec.epsilon > 1.0) throw validation_error("epsilon must lie in (0, 1]");
    if (!(spec.gamma > 0.0)) throw validation_error("gamma must be positive");
    for (int a = 0; a < dim; ++a) {
        if (!(spec.omega.upper[a] > spec.omega.lower[a])) throw validation_error("Omega box is empty");
    }
}

void require_grid_covers(const Box& omega, const Grid& grid) {
    if (grid.dim() != omega.dim) throw shape_error("grid and Omega dimensions differ");
    for (int a = 0; a < omega.dim; ++a) {
        const double lo = grid.origin()[a];
        const double hi = lo + static_cast<double>(grid.extent(a)) * grid.spacing();
        if (lo > omega.lower[a] + 1e-12 || hi < omega.upper[a] - 1e-12) {
            throw validation_error("grid bounding box does not contain Omega");
        }
    }
}

}  // namespace

DomainMask::DomainMask(Grid grid, std::vector<Label> labels) : grid_(std::move(grid)), labels_(std::move(labels)) {
    if (labels_.size() != grid_.size()) throw shape_error("mask label count does not match grid size");
}

std::size_t DomainMask::count(Label l) const { return static_cast<std::size_t>(std::count(labels_.begin(), labels_.end(), l)); }

ScalarField DomainMask::chi_eps() const {
    ScalarField f(grid_);
    for (std::size_t i = 0; i < labels_.size(); ++i) f[i] = labels_[i] == Label::omega_eps ? 1.0 : 0.0;
    return f;
}

ScalarField DomainMask::chi_omega() const {
    ScalarField f(grid_);
    for (std::size_t i = 0; i < labels_.size(); ++i) f[i] = labels_[i] != Label::exterior ? 1.0 : 0.0;
    return f;
}

std::vector<std::uint8_t> DomainMask::selector(Label l) const {
    std::vector<std::uint8_t> s(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) s[i] = labels_[i] == l ? 1 : 0;
    return s;
}

std::vector<std::uint8_t> DomainMask::omega_selector() const {
    std::vector<std::uint8_t> s(labels_.size());
    for (std::size_t i = 0; i < labels_.size(); ++i) s[i] = labels_[i] != Label::exterior ? 1 : 0;
    return s;
}

double PerforationSpec::hole_fraction() const {
    const int dim = this->dim();
    double cell = 1.0;
    for (int a = 0; a < dim; ++a) cell *= cell_lengths[a];
    if (const auto* ball = std::get_if<BallHole>(&hole)) {
        return unit_ball_volume(dim) * std::pow(ball->radius_factor, dim) / cell;
    }
    if (const auto* box = std::get_if<BoxHole>(&hole)) {
        double v = 1.0;
        for (int a = 0; a < dim; ++a) v *= box->upper[a] - box->lower[a];
        return v / cell;
    }
    return 0.0;
}

DomainMask build_periodic_mask(const PerforationSpec& spec, const Grid& grid) {
    validate_spec(spec);
    require_grid_covers(spec.omega, grid);
    const int dim = spec.dim();
    const ScaledHole hole = scaled_hole(spec);
    const double eps = spec.epsilon;

    std::vector<Label> labels(grid.size(), Label::exterior);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point x = grid.center(i);
        if (!spec.omega.contains(x)) continue;
        labels[i] = Label::omega_eps;
        if (!hole.present) continue;

        Point local{};
        Point hole_centre{};
        for (int a = 0; a < dim; ++a) {
            const double s = x[a] / eps;
            const double k = std::floor(s / spec.cell_lengths[a]);
            local[a] = s - k * spec.cell_lengths[a] - hole.centre[a];
            hole_centre[a] = eps * (k * spec.cell_lengths[a] + hole.centre[a]);
        }
        bool inside = true;
        if (hole.ball) {
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) r2 += local[a] * local[a];
            inside = r2 < hole.radius * hole.radius;
        } else {
            for (int a = 0; a < dim && inside; ++a) inside = std::abs(local[a]) <= hole.half_width[a];
        }
        if (!inside) continue;

        if (spec.interior_holes_only) {
            bool strictly_inside = true;
            for (int a = 0; a < dim; ++a) {
                const double reach = eps * (hole.ball ? hole.radius : hole.half_width[a]);
                if (!(hole_centre[a] - reach > spec.omega.lower[a] && hole_centre[a] + reach < spec.omega.upper[a])) {
                    strictly_inside = false;
                }
            }
            if (!strictly_inside) continue;
        }
        labels[i] = Label::hole;
    }

    DomainMask mask(grid, std::move(labels));
    if (hole.present) {
        double diameter = 2.0 * eps * hole.radius;
        if (!hole.ball) {
            diameter = 2.0 * eps * hole.half_width[0];
            for (int a = 1; a < dim; ++a) diameter = std::min(diameter, 2.0 * eps * hole.half_width[a]);
        }
        if (diameter < 2.0 * grid.spacing()) {
            mask.warnings.push_back("hole diameter " + std::to_string(diameter) + " is below two grid spacings "
                                    + std::to_string(2.0 * grid.spacing()) + "; holes are under-resolved");
        }
    }
    return mask;
}

Box oscillating_omega() {
    Box b;
    b.dim = 2;
    b.lower = {0.0, -1.0, 0.0};
    b.upper = {1.0, 1.0, 0.0};
    return b;
}

DomainMask build_oscillating_mask(double epsilon, const Grid& grid) {
    if (!(epsilon > 0.0)) throw validation_error("epsilon must be positive");
    const Box omega = oscillating_omega();
    require_grid_covers(omega, grid);
    std::vector<Label> labels(grid.size(), Label::exterior);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point p = grid.center(i);
        if (!omega.contains(p)) continue;
        labels[i] = p[1] < 0.5 * (1.0 + std::sin(p[0] / epsilon)) ? Label::omega_eps : Label::hole;
    }
    return DomainMask(grid, std::move(labels));
}

DomainMask build_annulus_mask(double inner, double outer, const Grid& grid) {
    if (!(inner > 0.0) || !(outer > inner)) throw validation_error("annulus requires 0 < inner < outer");
    std::vector<Label> labels(grid.size(), Label::exterior);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Point p = grid.center(i);
        double r2 = 0.0;
        for (int a = 0; a < grid.dim(); ++a) r2 += p[a] * p[a];
        if (r2 < inner * inner) {
            labels[i] = Label::omega_eps;
        } else if (r2 < outer * outer) {
            labels[i] = Label::hole;
        }
    }
    return DomainMask(grid, std::move(labels));
}

DomainMask build_box_mask(const Box& omega, const Grid& grid) {
    require_grid_covers(omega, grid);
    std::vector<Label> labels(grid.size(), Label::exterior);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (omega.contains(grid.center(i))) labels[i] = Label::omega_eps;
    }
    return DomainMask(grid, std::move(labels));
}

double oscillating_chi(double y) {
    if (y <= 0.0) return 1.0;
    if (y >= 1.0) return 0.0;
    return (std::numbers::pi - 2.0 * std::asin(2.0 * y - 1.0)) / (2.0 * std::numbers::pi);
}

WeakLimit analytic_weak_limit(const GeometryFamily& family, const Grid& grid) {
    if (const auto* spec = std::get_if<PerforationSpec>(&family)) {
        validate_spec(*spec);
        require_grid_covers(spec->omega, grid);
        LimitRegime regime = LimitRegime::full;
        double value = 1.0;
        if (!std::holds_alternative<NoHole>(spec->hole)) {
            if (spec->gamma == 1.0) {
                regime = LimitRegime::fraction;
                value = 1.0 - spec->hole_fraction();
            } else if (spec->gamma < 1.0) {
                regime = LimitRegime::vanishing;
                value = 0.0;
            }
        }
        ScalarField chi(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) chi[i] = spec->omega.contains(grid.center(i)) ? value : 0.0;
        return WeakLimit{CoefficientField{std::move(chi), CoefficientRole::chi}, regime, value};
    }
    if (std::holds_alternative<OscillatingFamily>(family)) {
        const Box omega = oscillating_omega();
        if (grid.dim() != 2) throw unsupported_geometry("the oscillating family is two-dimensional");
        require_grid_covers(omega, grid);
        ScalarField chi(grid);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const Point p = grid.center(i);
            chi[i] = omega.contains(p) ? oscillating_chi(p[1]) : 0.0;
        }
        return WeakLimit{CoefficientField{std::move(chi), CoefficientRole::chi}, LimitRegime::custom, 0.0};
    }
    throw unsupported_geometry("no analytic weak limit for this geometry family");
}

std::vector<double> weak_pairing_error(const DomainMask& mask, const WeakLimit& limit,
                                       const std::vector<ScalarField>& tests) {
    ScalarField diff = mask.chi_eps() - limit.chi.values;
    std::vector<double> errors;
    errors.reserve(tests.size());
    for (const auto& phi : tests) errors.push_back(std::abs(inner_product(diff, phi)));
    return errors;
}

namespace {

void write_header(std::ostream& out, const char* kind, const Grid& g) {
    std::ostringstream h;
    h.precision(17);
    h << kind << " dim=" << g.dim() << " extents=";
    for (int a = 0; a < g.dim(); ++a) h << (a ? "," : "") << g.extent(a);
    h << " spacing=" << g.spacing() << " origin=";
    for (int a = 0; a < g.dim(); ++a) h << (a ? "," : "") << g.origin()[a];
    out << h.str() << '\n';
}

template <class Emit>
void write_body(std::ostream& out, const Grid& g, Emit emit) {
    const auto row = static_cast<std::size_t>(g.extent(g.dim() - 1));
    const std::size_t slice = g.dim() == 3 ? row * static_cast<std::size_t>(g.extent(1)) : 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
        emit(i, i % row == 0);
        if ((i + 1) % row == 0) out << '\n';
        if (slice && (i + 1) % slice == 0 && i + 1 < g.size()) out << '\n';
    }
}

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) v.push_back(std::stod(item));
    return v;
}

}  // namespace

void write_mask(std::ostream& out, const DomainMask& mask) {
    write_header(out, "perfhom-mask", mask.grid());
    write_body(out, mask.grid(), [&](std::size_t i, bool) { out << label_char(mask[i]); });
}

void write_field(std::ostream& out, const ScalarField& field) {
    write_header(out, "perfhom-field", field.grid());
    std::ostringstream body;
    body.precision(17);
    write_body(body, field.grid(), [&](std::size_t i, bool first) { body << (first ? "" : " ") << field[i]; });
    out << body.str();
}

DomainMask read_mask(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw validation_error("empty mask dump");
    std::istringstream hs(header);
    std::string kind;
    hs >> kind;
    if (kind != "perfhom-mask") throw validation_error("not a mask dump: '" + kind + "'");
    int dim = 0;
    std::vector<double> extents;
    std::vector<double> origin;
    double spacing = 0.0;
    std::string token;
    while (hs >> token) {
        const auto eq = token.find('=');
        if (eq == std::string::npos) throw validation_error("malformed mask header token '" + token + "'");
        const std::string key = token.substr(0, eq);
        const std::string val = token.substr(eq + 1);
        if (key == "dim") {
            dim = std::stoi(val);
        } else if (key == "extents") {
            extents = parse_list(val);
        } else if (key == "spacing") {
            spacing = std::stod(val);
        } else if (key == "origin") {
            origin = parse_list(val);
        } else {
            throw validation_error("unknown mask header key '" + key + "'");
        }
    }
    if (dim < 1 || static_cast<int>(extents.size()) != dim || static_cast<int>(origin.size()) != dim) {
        throw validation_error("inconsistent mask header");
    }
    Point o{};
    std::array<long, kMaxDim> e{1, 1, 1};
    for (int a = 0; a < dim; ++a) {
        o[a] = origin[a];
        e[a] = static_cast<long>(extents[a]);
    }
    Grid grid(dim, o, spacing, e);
    std::vector<Label> labels;
    labels.reserve(grid.size());
    char c = 0;
    while (labels.size() < grid.size() && in.get(c)) {
        if (c == '\n' || c == '\r') continue;
        labels.push_back(char_label(c));
    }
    if (labels.size() != grid.size()) throw validation_error("mask dump is truncated");
    return DomainMask(grid, std::move(labels));
}

}  // namespace perfhom
