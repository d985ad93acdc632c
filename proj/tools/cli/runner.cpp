#include "runner.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <numbers>
#include <optional>
#include <set>
#include <sstream>

#include "perfhom/errors.hpp"
#include "perfhom/experiments.hpp"
#include "perfhom/geometry.hpp"
#include "perfhom/homogenize.hpp"
#include "perfhom/kernel.hpp"
#include "perfhom/localref.hpp"
#include "perfhom/nonlocal.hpp"

#ifndef PERFHOM_VERSION
#define PERFHOM_VERSION "unknown"
#endif

namespace perfhom::cli {

using json = nlohmann::ordered_json;

void Table::add(const std::vector<std::string>& row) {
    if (row.size() != columns.size()) throw std::logic_error("table row width does not match the header");
    rows.push_back(row);
}

std::string format_number(double v, const std::string& column) {
    if (!std::isfinite(v)) throw validation_error("non-finite value in column '" + column + "'");
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string num(double v, const std::string& column) { return format_number(v, column); }
std::string count(std::size_t v) { return std::to_string(v); }
std::string boolean(bool v) { return v ? "true" : "false"; }

using FieldWriter = std::function<void(std::ostream&)>;

struct Results {
    Table table;
    json summary = json::object();
    std::map<std::string, FieldWriter> fields;
    int exit_code = kExitOk;
    std::string message;
};

// ---------------------------------------------------------------------------
// Config blocks

Point point_from(const std::vector<double>& v, int dim, const std::string& key) {
    if (static_cast<int>(v.size()) != dim) {
        throw ConfigError("[geometry] " + key + " needs " + std::to_string(dim) + " entries");
    }
    Point p{};
    for (int a = 0; a < dim; ++a) p[a] = v[static_cast<std::size_t>(a)];
    return p;
}

int geometry_dim(const Config& c) {
    const long dim = c.integer("geometry", "dim", 2);
    if (dim < 1 || dim > kMaxDim) throw ConfigError("[geometry] dim must be 1, 2 or 3");
    return static_cast<int>(dim);
}

Box omega_box(const Config& c, int dim) {
    Box b;
    b.dim = dim;
    if (c.has("geometry", "omega_lower")) b.lower = point_from(c.numbers("geometry", "omega_lower"), dim, "omega_lower");
    if (c.has("geometry", "omega_upper")) {
        b.upper = point_from(c.numbers("geometry", "omega_upper"), dim, "omega_upper");
    } else {
        for (int a = 0; a < dim; ++a) b.upper[a] = 1.0;
    }
    return b;
}

HoleShape hole_from(const Config& c, int dim) {
    const std::string kind = c.text("geometry", "hole", "ball");
    if (kind == "none") return NoHole{};
    if (kind == "ball") return BallHole{c.number("geometry", "radius_factor", 0.25)};
    if (kind == "box") {
        return BoxHole{point_from(c.numbers("geometry", "hole_lower"), dim, "hole_lower"),
                       point_from(c.numbers("geometry", "hole_upper"), dim, "hole_upper")};
    }
    throw ConfigError("[geometry] hole must be none, ball or box");
}

/// Geometry resolved from the [geometry] block. Periodic families expose their
/// PerforationSpec; every family can build a mask on a grid.
struct Geometry {
    std::string name;
    Box omega;
    std::optional<PerforationSpec> periodic;
    double epsilon = 0.25;
    std::function<DomainMask(const Grid&, double)> build;
};

Geometry geometry_from(const Config& c) {
    Geometry g;
    g.name = c.text("geometry", "name", "periodic");
    g.epsilon = c.number("geometry", "epsilon", 0.25);
    if (g.name == "periodic" || g.name == "example2-strips") {
        PerforationSpec spec;
        if (g.name == "example2-strips") {
            spec.omega = Box{2, {-1.0, -1.0, 0.0}, {1.0, 1.0, 0.0}};
            spec.cell_lengths = {1.0, 1.0};
            spec.hole = BoxHole{{0.0, 1.0 / 3.0, 0.0}, {1.0, 2.0 / 3.0, 0.0}};
        } else {
            const int dim = geometry_dim(c);
            spec.omega = omega_box(c, dim);
            spec.cell_lengths =
                c.has("geometry", "cell_lengths") ? c.numbers("geometry", "cell_lengths") : std::vector<double>(dim, 1.0);
            spec.hole = hole_from(c, dim);
            spec.interior_holes_only = c.flag("geometry", "interior_holes_only", false);
        }
        spec.gamma = c.number("geometry", "gamma", 1.0);
        spec.epsilon = g.epsilon;
        g.omega = spec.omega;
        g.periodic = spec;
        g.build = [spec](const Grid& grid, double eps) {
            PerforationSpec s = spec;
            s.epsilon = eps;
            return build_periodic_mask(s, grid);
        };
    } else if (g.name == "box") {
        g.omega = omega_box(c, geometry_dim(c));
        const Box omega = g.omega;
        g.build = [omega](const Grid& grid, double) { return build_box_mask(omega, grid); };
    } else if (g.name == "example1-annulus") {
        const double inner = c.number("geometry", "inner_radius", 3.0);
        const double outer = c.number("geometry", "outer_radius", 6.0);
        g.omega = Box{2, {-outer, -outer, 0.0}, {outer, outer, 0.0}};
        g.build = [inner, outer](const Grid& grid, double) { return build_annulus_mask(inner, outer, grid); };
    } else if (g.name == "oscillating") {
        g.omega = oscillating_omega();
        g.build = [](const Grid& grid, double eps) { return build_oscillating_mask(eps, grid); };
    } else {
        throw ConfigError("[geometry] name must be periodic, box, example1-annulus, example2-strips or oscillating");
    }
    return g;
}

KernelSpec kernel_from(const Config& c, int dim) {
    KernelSpec k = make_kernel(static_cast<int>(c.integer("kernel", "dim", dim)), parse_profile(c.text("kernel", "profile", "bump")));
    const double delta = c.number("kernel", "delta", 1.0);
    const RescaleMode mode = parse_rescale_mode(c.text("kernel", "mode", "mass1"));
    if (delta != 1.0 || mode != RescaleMode::mass1) k = rescale(k, delta, mode);
    if (k.dim != dim) throw ConfigError("[kernel] dim does not match the geometry dimension");
    return k;
}

SolveOptions solve_from(const Config& c) {
    SolveOptions o;
    o.tol = c.number("solver", "tol", o.tol);
    const long max_iter = c.integer("solver", "max_iter", 0);
    if (max_iter < 0) throw ConfigError("[solver] max_iter must be nonnegative");
    o.max_iterations = static_cast<std::size_t>(max_iter);
    return o;
}

SpectralOptions spectral_from(const Config& c) {
    SpectralOptions o;
    o.tol = c.number("solver", "eigen_tol", o.tol);
    const long seed = c.integer("solver", "seed", static_cast<long>(o.seed));
    if (seed < 0) throw ConfigError("[solver] seed must be nonnegative");
    o.seed = static_cast<std::uint64_t>(seed);
    const long basis = c.integer("solver", "basis_size", static_cast<long>(o.basis_size));
    if (basis < 2) throw ConfigError("[solver] basis_size must be at least 2");
    o.basis_size = static_cast<std::size_t>(basis);
    return o;
}

GridPolicy grid_policy_from(const Config& c) {
    GridPolicy p;
    if (c.has("grid", "spacing") && c.has("grid", "ratio")) throw ConfigError("[grid] give spacing or ratio, not both");
    p.fixed_spacing = c.number("grid", "spacing", 0.0);
    p.ratio = c.number("grid", "ratio", p.ratio);
    if (c.has("grid", "spacing") && !(p.fixed_spacing > 0.0)) throw ConfigError("[grid] spacing must be positive");
    if (!(p.ratio > 0.0)) throw ConfigError("[grid] ratio must be positive");
    return p;
}

BoundaryCondition bc_from(const Config& c) { return parse_boundary_condition(c.text("problem", "bc", "dirichlet")); }

SpatialFunction forcing_from(const Config& c, const Box& omega) {
    const std::string kind = c.text("problem", "forcing", "constant");
    const double scale = c.number("problem", "forcing_scale", 1.0);
    auto prod_sin = [omega](const Point& x) {
        double v = 1.0;
        for (int a = 0; a < omega.dim; ++a) {
            v *= std::sin(std::numbers::pi * (x[a] - omega.lower[a]) / (omega.upper[a] - omega.lower[a]));
        }
        return v;
    };
    if (kind == "constant") return [scale](const Point&) { return scale; };
    if (kind == "sine-product") return [scale, prod_sin](const Point& x) { return scale * prod_sin(x); };
    if (kind == "laplacian-sine") {
        double factor = 0.0;
        for (int a = 0; a < omega.dim; ++a) {
            const double l = omega.upper[a] - omega.lower[a];
            factor += std::numbers::pi * std::numbers::pi / (l * l);
        }
        return [scale, factor, prod_sin](const Point& x) { return -scale * factor * prod_sin(x); };
    }
    throw ConfigError("[problem] forcing must be constant, sine-product or laplacian-sine");
}

ScalarField sample_on_omega(const SpatialFunction& fn, const DomainMask& mask) {
    ScalarField f(mask.grid());
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (mask.in_omega(i)) f[i] = fn(mask.grid().center(i));
    }
    return f;
}

double single_spacing(const Config& c, double epsilon) {
    const GridPolicy p = grid_policy_from(c);
    return p.spacing(epsilon);
}

FieldWriter mask_writer(DomainMask mask) {
    return [mask = std::move(mask)](std::ostream& out) { write_mask(out, mask); };
}

FieldWriter field_writer(ScalarField field) {
    return [field = std::move(field)](std::ostream& out) { write_field(out, field); };
}

json certificate_json(const CoveringCertificate& cert) {
    return json{{"established", cert.established},
                {"layer_width", cert.layer_width},
                {"layer_count", cert.layer_count},
                {"empty_layers", cert.empty_layers},
                {"lambda_lower", cert.lambda_lower},
                {"eigenvalue_lower", cert.eigenvalue_lower},
                {"failed_layer", cert.failed_layer},
                {"diagnostic", cert.diagnostic}};
}

void sweep_table(const std::vector<SweepRecord>& rows, Results& r) {
    json failures = json::array();
    for (const auto& rec : rows) {
        if (!rec.ok()) {
            failures.push_back(json{{rec.parameter, rec.value}, {"error", rec.error}});
            continue;
        }
        if (r.table.columns.empty()) {
            for (const auto& [name, v] : rec.diagnostics) r.table.columns.push_back(name);
        }
        std::vector<std::string> row;
        for (const auto& [name, v] : rec.diagnostics) row.push_back(num(v, name));
        r.table.add(row);
    }
    r.summary["rows"] = r.table.rows.size();
    r.summary["failed_rows"] = failures;
    if (!failures.empty()) {
        r.exit_code = kExitSolver;
        r.message = std::to_string(failures.size()) + " sweep row(s) failed; see the summary";
    }
}

// ---------------------------------------------------------------------------
// Experiments

Results run_validate_kernel(const Config& c) {
    const KernelSpec k = kernel_from(c, static_cast<int>(c.integer("kernel", "dim", 2)));
    const KernelReport report = validate_kernel(k);
    Results r;
    r.table.columns = {"property", "passed", "informational", "detail"};
    for (const auto& p : report.properties) {
        r.table.add({p.name, boolean(p.passed), boolean(p.informational), "\"" + p.detail + "\""});
    }
    r.summary["passed"] = report.passed();
    r.summary["c_constant"] = k.c_constant();
    r.summary["mass"] = mass_by_quadrature(k);
    r.summary["expected_mass"] = k.expected_mass();
    if (!report.passed()) {
        r.exit_code = kExitValidation;
        r.message = "kernel validation failed: " + report.failures();
    }
    return r;
}

struct SingleSetup {
    Geometry geometry;
    KernelSpec kernel;
    double h;
    DomainMask mask;
    SampledKernel sampled;
};

SingleSetup single_setup(const Config& c) {
    Geometry g = geometry_from(c);
    const KernelSpec k = kernel_from(c, g.omega.dim);
    const double h = single_spacing(c, g.epsilon);
    const double margin = c.number("grid", "margin", k.support_radius());
    const Grid grid = Grid::covering(g.omega, h, margin);
    DomainMask mask = g.build(grid, g.epsilon);
    SampledKernel sampled = sample(k, h);
    return SingleSetup{std::move(g), k, h, std::move(mask), std::move(sampled)};
}

Results run_solve(const Config& c) {
    const SingleSetup s = single_setup(c);
    const NonlocalOperator op(s.mask, s.sampled, bc_from(c));
    const ScalarField f = sample_on_omega(forcing_from(c, s.geometry.omega), s.mask);
    const SolveResult sol = solve(op, f, solve_from(c));
    Results r;
    r.table.columns = {"epsilon", "h", "unknowns", "l2_norm_u", "solver_iters", "residual"};
    r.table.add({num(s.geometry.epsilon, "epsilon"), num(s.h, "h"), count(op.unknowns().size()),
                 num(l2_norm(sol.u), "l2_norm_u"), count(sol.iterations), num(sol.residual, "residual")});
    r.summary["warnings"] = s.mask.warnings;
    r.fields["mask"] = mask_writer(s.mask);
    r.fields["f"] = field_writer(f);
    r.fields["u"] = field_writer(sol.u);
    r.fields["chi"] = field_writer(s.mask.chi_eps());
    return r;
}

Results run_eigen(const Config& c) {
    const SingleSetup s = single_setup(c);
    const NonlocalOperator op(s.mask, s.sampled, bc_from(c));
    const SpectralResult eig = first_eigenvalue(op, spectral_from(c));
    const double width = c.number("problem", "layer_width", s.kernel.support_radius() / 2.0);
    const CoveringCertificate cert = covering_lower_bound(s.mask, s.sampled, width);
    Results r;
    r.table.columns = {"epsilon", "h", "unknowns", "lambda1", "eigen_residual", "eigen_iterations", "singular",
                       "seed", "certificate_established", "lambda_lower", "eigenvalue_lower", "layer_count"};
    r.table.add({num(s.geometry.epsilon, "epsilon"), num(s.h, "h"), count(op.unknowns().size()),
                 num(eig.eigenvalue, "lambda1"), num(eig.residual, "eigen_residual"), count(eig.iterations),
                 boolean(eig.singular), std::to_string(eig.seed), boolean(cert.established),
                 num(cert.lambda_lower, "lambda_lower"), num(cert.eigenvalue_lower, "eigenvalue_lower"),
                 count(cert.layer_count)});
    r.summary["lambda1"] = eig.eigenvalue;
    r.summary["singular"] = eig.singular;
    r.summary["certificate"] = certificate_json(cert);
    r.summary["warnings"] = s.mask.warnings;
    if (!cert.established && c.flag("problem", "require_certificate", false)) {
        r.exit_code = kExitValidation;
        r.message = "covering certificate not established: " + cert.diagnostic;
    }
    r.fields["mask"] = mask_writer(s.mask);
    r.fields["eigenvector"] = field_writer(eig.eigenvector);
    return r;
}

Results run_covering(const Config& c) {
    const SingleSetup s = single_setup(c);
    const double width = c.number("problem", "layer_width", s.kernel.support_radius() / 2.0);
    const CoveringCertificate cert = covering_lower_bound(s.mask, s.sampled, width);
    Results r;
    r.table.columns = {"layer", "nodes", "alpha", "chain"};
    for (std::size_t j = 0; j < cert.alpha.size(); ++j) {
        // The chain is undefined from the first layer with alpha = 0 on; those cells stay empty.
        const bool defined = j < cert.chain.size() && std::isfinite(cert.chain[j]);
        r.table.add({count(j + 1), count(cert.layer_sizes[j]), num(cert.alpha[j], "alpha"),
                     defined ? num(cert.chain[j], "chain") : std::string{}});
    }
    r.summary["certificate"] = certificate_json(cert);
    if (!cert.established && c.flag("problem", "require_certificate", false)) {
        r.exit_code = kExitValidation;
        r.message = "covering certificate not established: " + cert.diagnostic;
    }
    r.fields["mask"] = mask_writer(s.mask);
    r.fields["distance"] = field_writer(distance_to_label(s.mask, Label::exterior));
    return r;
}

Results run_epsilon_sweep(const Config& c) {
    const Geometry g = geometry_from(c);
    if (!g.periodic) throw ConfigError("epsilon-sweep needs a periodic geometry");
    EpsilonSweepConfig cfg;
    cfg.geometry = *g.periodic;
    cfg.epsilons = c.numbers("sweep", "epsilons");
    cfg.bc = bc_from(c);
    cfg.kernel = kernel_from(c, g.omega.dim);
    cfg.f = forcing_from(c, g.omega);
    cfg.grid = grid_policy_from(c);
    cfg.solve = solve_from(c);
    cfg.compute_eigenvalue = c.flag("problem", "eigenvalue", true);
    cfg.spectral = spectral_from(c);
    cfg.spectral.tol = c.number("solver", "eigen_tol", 1e-6);
    Results r;
    sweep_table(epsilon_sweep(cfg), r);
    return r;
}

Results run_delta_sweep(const Config& c) {
    const Geometry g = geometry_from(c);
    const std::vector<double> deltas = c.numbers("sweep", "deltas");
    const double h = single_spacing(c, g.epsilon);
    double margin = 0.0;
    for (double d : deltas) margin = std::max(margin, d);
    const Grid grid = Grid::covering(g.omega, h, c.number("grid", "margin", margin));
    const DomainMask mask = g.build(grid, g.epsilon);
    const BoundaryCondition bc = bc_from(c);
    LocalProblem reference{mask, HoleCondition::dirichlet, 0.0, std::nullopt, identity_tensor(kMaxDim)};
    if (bc == BoundaryCondition::neumann_holes) reference.holes = HoleCondition::neumann;
    DeltaSweepConfig cfg{mask,
                         parse_profile(c.text("kernel", "profile", "bump")),
                         bc,
                         deltas,
                         sample_on_omega(forcing_from(c, g.omega), mask),
                         reference,
                         solve_from(c)};
    Results r;
    sweep_table(delta_localization_sweep(cfg), r);
    r.fields["mask"] = mask_writer(mask);
    return r;
}

Results run_nonlocal_critical(const Config& c) {
    const Geometry g = geometry_from(c);
    if (g.name != "periodic" && g.name != "box") throw ConfigError("nonlocal-critical uses a box Omega");
    CriticalSweepConfig cfg;
    cfg.omega = g.omega;
    cfg.c0 = c.number("sweep", "c0", cfg.c0);
    cfg.gamma = c.number("sweep", "gamma", cfg.gamma);
    cfg.epsilons = c.numbers("sweep", "epsilons");
    cfg.kernel = kernel_from(c, g.omega.dim);
    cfg.f = forcing_from(c, g.omega);
    cfg.grid = grid_policy_from(c);
    cfg.solve = solve_from(c);
    cfg.compute_eigenvalue = c.flag("problem", "eigenvalue", false);
    cfg.spectral = spectral_from(c);
    Results r;
    sweep_table(nonlocal_critical_sweep(cfg), r);
    return r;
}

Results run_iterated_limits(const Config& c) {
    IteratedLimitConfig cfg;
    cfg.dim = static_cast<int>(c.integer("cases", "dim", cfg.dim));
    cfg.side = c.number("cases", "side", cfg.side);
    const long nodes = c.integer("cases", "nodes", cfg.nodes);
    if (nodes < 3) throw ConfigError("[cases] nodes must be at least 3");
    cfg.nodes = nodes;
    cfg.c0 = c.number("cases", "c0", cfg.c0);
    cfg.cell_spacing = c.number("cases", "cell_spacing", cfg.cell_spacing);
    cfg.cell = CellGeometry{std::vector<double>(static_cast<std::size_t>(std::max(cfg.dim, 1)), 1.0),
                            BallHole{c.number("cases", "cell_radius", 0.25)}};
    cfg.solve = solve_from(c);
    cfg.solve.tol = c.number("solver", "tol", 1e-10);
    Box omega;
    omega.dim = cfg.dim;
    for (int a = 0; a < cfg.dim; ++a) omega.upper[a] = cfg.side;
    cfg.f = forcing_from(c, omega);

    const std::string bc = c.text("cases", "bc", "dirichlet");
    if (bc != "dirichlet" && bc != "neumann") throw ConfigError("[cases] bc must be dirichlet or neumann");
    Results r;
    r.table.columns = {"case_id", "bc", "regime", "w_norm", "v_norm", "distance", "verdict", "predicted", "mu",
                       "q11", "material_fraction"};
    json verdicts = json::array();
    bool all_match = true;
    for (const auto& name : c.words("cases", "regimes")) {
        const Regime regime = parse_regime(name);
        const CaseVerdict v =
            bc == "dirichlet" ? iterated_limit_dirichlet(regime, cfg) : iterated_limit_neumann(regime, cfg);
        r.table.add({v.case_id, v.bc, std::string(to_string(v.regime)), num(v.w_norm, "w_norm"),
                     num(v.v_norm, "v_norm"), num(v.distance, "distance"), v.equal ? "equal" : "unequal",
                     v.predicted_equal ? "equal" : "unequal", num(v.mu, "mu"), num(v.q[0][0], "q11"),
                     num(v.material_fraction, "material_fraction")});
        verdicts.push_back(json{{"case_id", v.case_id}, {"equal", v.equal}, {"predicted_equal", v.predicted_equal}});
        all_match = all_match && v.equal == v.predicted_equal;
        r.fields["w_" + v.case_id] = field_writer(v.w);
        r.fields["v_" + v.case_id] = field_writer(v.v);
    }
    r.summary["verdicts"] = verdicts;
    r.summary["matches_case_table"] = all_match;
    return r;
}

Results run_cell_coefficients(const Config& c) {
    const int dim = geometry_dim(c);
    CellGeometry cell;
    cell.cell_lengths =
        c.has("geometry", "cell_lengths") ? c.numbers("geometry", "cell_lengths") : std::vector<double>(dim, 1.0);
    cell.hole = hole_from(c, dim);
    if (static_cast<int>(cell.cell_lengths.size()) != dim) throw ConfigError("[geometry] cell_lengths needs dim entries");
    const double h = c.number("grid", "spacing");
    const CellSolution sol = homogenized_coefficients(cell, h, c.number("solver", "tol", 1e-11));
    Results r;
    r.table.columns = {"i", "j", "q"};
    json q = json::array();
    for (int i = 0; i < dim; ++i) {
        json row = json::array();
        for (int j = 0; j < dim; ++j) {
            r.table.add({std::to_string(i + 1), std::to_string(j + 1), num(sol.q[i][j], "q")});
            row.push_back(sol.q[i][j]);
        }
        q.push_back(row);
    }
    r.summary["q"] = q;
    r.summary["material_fraction"] = sol.material_fraction;
    r.summary["iterations"] = sol.iterations;
    for (std::size_t i = 0; i < sol.corrector.size(); ++i) {
        r.fields["corrector" + std::to_string(i + 1)] = field_writer(sol.corrector[i]);
    }
    return r;
}

Results dispatch(const Config& c) {
    const std::string kind = c.kind();
    if (kind == "validate-kernel") return run_validate_kernel(c);
    if (kind == "solve") return run_solve(c);
    if (kind == "eigen") return run_eigen(c);
    if (kind == "covering") return run_covering(c);
    if (kind == "epsilon-sweep") return run_epsilon_sweep(c);
    if (kind == "delta-sweep") return run_delta_sweep(c);
    if (kind == "nonlocal-critical") return run_nonlocal_critical(c);
    if (kind == "iterated-limits") return run_iterated_limits(c);
    if (kind == "cell-coefficients") return run_cell_coefficients(c);
    throw ConfigError("unknown experiment kind '" + kind + "'");
}

std::string utc_now() {
    const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::filesystem::path write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    return path;
}

std::string csv_text(const Table& t) {
    std::ostringstream out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
    return out.str();
}

// Units per column; everything not listed is dimensionless.
json column_units(const Table& t) {
    static const std::set<std::string> lengths{"h", "epsilon", "delta", "layer_width"};
    json units = json::object();
    for (const auto& col : t.columns) units[col] = lengths.count(col) ? "length" : "1";
    return units;
}

}  // namespace

RunReport run(const Config& config, const RunOptions& options) {
    const long threads = config.integer("solver", "threads", 1);
    if (threads < 1) throw ConfigError("[solver] threads must be at least 1");
    const std::string prefix = config.text("output", "prefix", config.kind());

    Results results = dispatch(config);

    std::set<std::string> requested(options.emit_fields.begin(), options.emit_fields.end());
    for (const auto& name : requested) {
        bool known = results.fields.count(name) > 0;
        // "w" and "v" select every case of an iterated-limits run.
        for (const auto& [field, writer] : results.fields) {
            if (field.rfind(name + "_", 0) == 0 && (name == "w" || name == "v")) known = true;
        }
        if (!known) {
            std::string available;
            for (const auto& [field, writer] : results.fields) available += (available.empty() ? "" : ", ") + field;
            throw ConfigError("--emit-fields: '" + name + "' is not available for " + config.kind() + " (available: "
                              + available + ")");
        }
    }

    std::filesystem::create_directories(options.output_dir);
    RunReport report;
    report.exit_code = results.exit_code;
    report.message = results.message;
    report.written.push_back(write_text(options.output_dir / (prefix + ".csv"), csv_text(results.table)));
    const std::string normalized = config.normalized();
    report.written.push_back(write_text(options.output_dir / (prefix + ".config.ini"), normalized));

    for (const auto& [field, writer] : results.fields) {
        bool wanted = requested.count(field) > 0;
        for (const auto& name : {std::string("w"), std::string("v")}) {
            if (requested.count(name) && field.rfind(name + "_", 0) == 0) wanted = true;
        }
        if (!wanted) continue;
        std::ostringstream text;
        writer(text);
        report.written.push_back(write_text(options.output_dir / (prefix + "." + field + ".txt"), text.str()));
    }

    json summary;
    summary["experiment"] = config.kind();
    summary["status"] = results.exit_code == kExitOk ? "ok" : "failed";
    summary["exit_code"] = results.exit_code;
    if (!results.message.empty()) summary["message"] = results.message;
    summary["config"] = normalized;
    summary["columns"] = column_units(results.table);
    summary["results"] = results.summary;
    summary["provenance"] = json{{"version", PERFHOM_VERSION},
                                 {"seed", config.integer("solver", "seed", 20240611)},
                                 {"threads", threads},
                                 {"timestamp", options.timestamp.empty() ? utc_now() : options.timestamp}};
    report.written.push_back(write_text(options.output_dir / (prefix + ".summary.json"), summary.dump(2) + "\n"));
    return report;
}

int exit_code_for_current_exception(std::string& message) {
    try {
        throw;
    } catch (const ConfigError& e) {
        message = e.what();
        return kExitConfig;
    } catch (const verdict_gap_error& e) {
        message = e.what();
        return kExitVerdictGap;
    } catch (const solver_error& e) {
        message = e.what();
        return kExitSolver;
    } catch (const error& e) {
        message = e.what();
        return kExitValidation;
    } catch (const std::exception& e) {
        message = e.what();
        return 1;
    }
}

}  // namespace perfhom::cli
