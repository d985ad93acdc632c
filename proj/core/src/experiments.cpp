#include "perfhom/experiments.hpp"

#include <cmath>

#include "perfhom/errors.hpp"

namespace perfhom {
namespace {

struct CaseGrid {
    Grid grid;
    DomainMask mask;
    ScalarField f;
};

CaseGrid case_grid(const IteratedLimitConfig& config) {
    if (config.dim < 1 || config.dim > kMaxDim) throw validation_error("case-study dimension must be in [1, 3]");
    if (config.nodes < 2) throw validation_error("case-study grid needs at least 2 interior nodes per axis");
    if (!(config.side > 0.0)) throw validation_error("case-study domain side must be positive");
    Box box;
    box.dim = config.dim;
    for (int a = 0; a < config.dim; ++a) box.upper[a] = config.side;
    const double h = config.side / static_cast<double>(config.nodes);
    Grid grid = Grid::covering(box, h, 0.0);
    DomainMask mask = build_box_mask(box, grid);
    ScalarField f(grid);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (mask.in_omega(i)) f[i] = config.f(grid.center(i));
    }
    return CaseGrid{grid, std::move(mask), std::move(f)};
}

ScalarField local_solve(const DomainMask& mask, const ScalarField& f, double reaction, const Tensor& q,
                        const SolveOptions& options) {
    LocalProblem p{mask, HoleCondition::dirichlet, reaction, std::nullopt, q};
    return solve_local(p, f, options).v;
}

void finish(CaseVerdict& verdict, double tol) {
    verdict.w_norm = l2_norm(verdict.w);
    verdict.v_norm = l2_norm(verdict.v);
    verdict.distance = l2_norm(verdict.w - verdict.v) / std::max({verdict.w_norm, verdict.v_norm, 1.0});
    verdict.equal = classify_distance(verdict.distance, tol);
}

}  // namespace

std::string_view to_string(Regime r) {
    switch (r) {
        case Regime::ll_b: return "ll_b";
        case Regime::eq_b: return "eq_b";
        case Regime::between_a_b: return "between_a_b";
        case Regime::eq_a: return "eq_a";
        case Regime::ll_a: return "ll_a";
    }
    return "?";
}

Regime parse_regime(std::string_view name) {
    if (name == "ll_b") return Regime::ll_b;
    if (name == "eq_b") return Regime::eq_b;
    if (name == "between_a_b") return Regime::between_a_b;
    if (name == "eq_a") return Regime::eq_a;
    if (name == "ll_a") return Regime::ll_a;
    throw validation_error("unknown regime '" + std::string(name) + "'");
}

bool classify_distance(double distance, double tol) {
    if (!(distance >= 0.0)) throw validation_error("verdict distance must be a nonnegative number");
    if (distance <= 5.0 * tol) return true;
    if (distance >= kUnequalThreshold) return false;
    throw verdict_gap_error("verdict distance lies between the equal and unequal thresholds", distance);
}

std::vector<SweepRecord> delta_localization_sweep(const DeltaSweepConfig& config) {
    const Grid& g = config.mask.grid();
    require_same_grid(config.f.grid(), g, "delta sweep right-hand side");
    if (config.deltas.empty()) throw validation_error("delta sweep needs at least one delta");
    for (std::size_t i = 1; i < config.deltas.size(); ++i) {
        if (!(config.deltas[i] < config.deltas[i - 1])) throw validation_error("deltas must be strictly decreasing");
    }
    const double delta_min = config.deltas.back();
    if (g.spacing() > 0.25 * delta_min * (1.0 + 1e-12)) {
        throw validation_error("grid spacing " + std::to_string(g.spacing()) + " exceeds delta_min / 4 = "
                               + std::to_string(0.25 * delta_min));
    }
    const ScalarField reference = solve_local(config.reference, config.f, config.solve).v;
    const auto omega_eps = config.mask.selector(Label::omega_eps);
    const double reference_norm = l2_norm(restrict_field(reference, omega_eps));

    std::vector<SweepRecord> records;
    for (double delta : config.deltas) {
        SweepRecord rec;
        rec.parameter = "delta";
        rec.value = delta;
        rec.diagnostics.emplace_back("delta", delta);
        rec.diagnostics.emplace_back("h", g.spacing());
        try {
            const KernelSpec k = rescale(make_kernel(g.dim(), config.profile), delta, RescaleMode::second_moment);
            const NonlocalOperator op(config.mask, sample(k, g.spacing()), config.bc);
            const SolveResult u = solve(op, config.f, config.solve);
            rec.diagnostics.emplace_back("error_l2", l2_norm(restrict_field(u.u - reference, omega_eps)));
            rec.diagnostics.emplace_back("l2_norm_u", l2_norm(u.u));
            rec.diagnostics.emplace_back("reference_norm", reference_norm);
            rec.diagnostics.emplace_back("solver_iters", static_cast<double>(u.iterations));
            rec.diagnostics.emplace_back("residual", u.residual);
        } catch (const error& e) {
            rec.error = e.what();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

CaseVerdict iterated_limit_dirichlet(Regime regime, const IteratedLimitConfig& config) {
    if (regime == Regime::ll_b) {
        throw validation_error("regime ll_b spans Dirichlet cases 2-4; choose between_a_b, eq_a or ll_a");
    }
    if (regime == Regime::eq_a && config.dim < 3) {
        throw validation_error("regime eq_a needs N >= 3 (the local critical radius is undefined otherwise)");
    }
    const CaseGrid cg = case_grid(config);
    const Tensor q = identity_tensor(config.dim);
    CaseVerdict verdict{"", "dirichlet", regime, ScalarField(cg.grid), ScalarField(cg.grid)};
    verdict.q = q;

    switch (regime) {
        case Regime::eq_b:
            verdict.case_id = "dirichlet-1";
            verdict.predicted_equal = true;
            break;
        case Regime::between_a_b:
            verdict.case_id = "dirichlet-2";
            verdict.predicted_equal = false;
            verdict.w = local_solve(cg.mask, cg.f, 0.0, q, config.solve);
            break;
        case Regime::eq_a:
            verdict.case_id = "dirichlet-3";
            verdict.predicted_equal = false;
            verdict.mu = mu_constant(config.dim, config.c0);
            verdict.w = local_solve(cg.mask, cg.f, 0.0, q, config.solve);
            verdict.v = local_solve(cg.mask, cg.f, verdict.mu, q, config.solve);
            break;
        case Regime::ll_a:
            verdict.case_id = "dirichlet-4";
            verdict.predicted_equal = true;
            verdict.w = local_solve(cg.mask, cg.f, 0.0, q, config.solve);
            verdict.v = verdict.w;
            break;
        case Regime::ll_b:
            break;
    }
    finish(verdict, config.solve.tol);
    return verdict;
}

CaseVerdict iterated_limit_neumann(Regime regime, const IteratedLimitConfig& config) {
    if (regime != Regime::eq_b && regime != Regime::ll_b) {
        throw validation_error("the Neumann case table distinguishes only eq_b and ll_b");
    }
    const CaseGrid cg = case_grid(config);
    CaseVerdict verdict{"", "neumann", regime, ScalarField(cg.grid), ScalarField(cg.grid)};
    if (regime == Regime::eq_b) {
        if (config.cell.dim() != config.dim) throw validation_error("cell dimension differs from the domain dimension");
        const CellSolution cell = homogenized_coefficients(config.cell, config.cell_spacing);
        Tensor q{};
        for (int a = 0; a < config.dim; ++a) {
            for (int b = 0; b < config.dim; ++b) q[a][b] = 0.5 * (cell.q[a][b] + cell.q[b][a]);
        }
        verdict.case_id = "neumann-1";
        verdict.predicted_equal = false;
        verdict.q = q;
        verdict.material_fraction = cell.material_fraction;
        verdict.v = local_solve(cg.mask, cell.material_fraction * cg.f, 0.0, q, config.solve);
    } else {
        verdict.case_id = "neumann-2";
        verdict.predicted_equal = true;
        verdict.q = identity_tensor(config.dim);
        verdict.w = local_solve(cg.mask, cg.f, 0.0, verdict.q, config.solve);
        verdict.v = verdict.w;
    }
    finish(verdict, config.solve.tol);
    return verdict;
}

std::vector<SweepRecord> nonlocal_critical_sweep(const CriticalSweepConfig& config) {
    if (!(config.c0 > 0.0)) throw validation_error("C0 must be positive");
    EpsilonSweepConfig sweep;
    sweep.geometry.cell_lengths.assign(static_cast<std::size_t>(config.omega.dim), 1.0);
    sweep.geometry.hole = BallHole{config.c0};
    sweep.geometry.gamma = config.gamma;
    sweep.geometry.omega = config.omega;
    sweep.epsilons = config.epsilons;
    sweep.bc = BoundaryCondition::dirichlet_holes;
    sweep.kernel = config.kernel;
    sweep.f = config.f;
    sweep.grid = config.grid;
    sweep.solve = config.solve;
    sweep.compute_eigenvalue = config.compute_eigenvalue;
    sweep.spectral = config.spectral;

    const double fraction = sweep.geometry.hole_fraction();
    double chi = 1.0;
    if (config.gamma == 1.0) chi = 1.0 - fraction;
    if (config.gamma < 1.0) chi = 0.0;
    const bool vanishing = chi < kVanishingThreshold;
    const double nu = vanishing ? 0.0 : (1.0 - chi) / chi;

    const SolveOptions solve_opts = config.solve;
    sweep.limit_solver = [=](const DomainMask& mask, const SampledKernel& kernel, const ScalarField& f) {
        if (vanishing) return ScalarField(mask.grid());
        ScalarField nu_values(mask.grid());
        for (std::size_t i = 0; i < nu_values.size(); ++i) nu_values[i] = mask.in_omega(i) ? nu : 0.0;
        return solve_nu_form(mask, kernel, nu_values, f, solve_opts).u;
    };

    std::vector<SweepRecord> records = epsilon_sweep(sweep);
    for (auto& rec : records) {
        if (!rec.ok()) continue;
        rec.diagnostics.emplace_back("chi_limit", chi);
        if (!vanishing) rec.diagnostics.emplace_back("nu", nu);
    }
    return records;
}

}  // namespace perfhom
