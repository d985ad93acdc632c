#include "perfhom/homogenize.hpp"

#include <cmath>
#include <numbers>

#include "linear_solver.hpp"
#include "perfhom/errors.hpp"

namespace perfhom {
namespace {

void require_chi(const CoefficientField& chi, const DomainMask& omega) {
    require_same_grid(chi.values.grid(), omega.grid(), "coefficient field");
    for (std::size_t i = 0; i < chi.values.size(); ++i) {
        const double v = chi.values[i];
        if (!(v >= 0.0 && v <= 1.0)) throw validation_error("X must take values in [0, 1]");
        if (!omega.in_omega(i) && v != 0.0) throw validation_error("X must vanish outside Omega");
    }
}

std::size_t default_iterations(std::size_t n) {
    return static_cast<std::size_t>(20.0 * std::sqrt(static_cast<double>(n))) + 200;
}

// Solves (A_op + diag(z)) x = -f on the unknowns of `op` (Dirichlet-type
// operator, so A_op = m - K). Returns the solution and the CG diagnostics.
struct ShiftedSolve {
    std::vector<double> x;
    detail::CgResult cg;
};

ShiftedSolve shifted_solve(const NonlocalOperator& op, const std::vector<double>& z, const std::vector<double>& f,
                           double tol, std::size_t max_iterations) {
    const std::size_t n = op.unknowns().size();
    std::vector<double> diag = op.compressed_diagonal();
    for (std::size_t k = 0; k < n; ++k) diag[k] += z[k];
    std::vector<double> b(f);
    for (double& v : b) v = -v;
    ShiftedSolve out;
    out.x.assign(n, 0.0);
    out.cg = detail::conjugate_gradient(
        [&](std::span<const double> in, std::span<double> y) {
            op.apply_compressed(in, y);
            for (std::size_t k = 0; k < n; ++k) y[k] += z[k] * in[k];
        },
        diag, b, out.x, tol, max_iterations ? max_iterations : default_iterations(n));
    return out;
}

// Omega \ D as the unknown set of a Dirichlet-type operator; D becomes "hole".
DomainMask support_mask(const DomainMask& omega, const ScalarField* chi) {
    std::vector<Label> labels(omega.grid().size(), Label::exterior);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (!omega.in_omega(i)) continue;
        labels[i] = (chi == nullptr || (*chi)[i] >= kVanishingThreshold) ? Label::omega_eps : Label::hole;
    }
    return DomainMask(omega.grid(), std::move(labels));
}

void require_supported_rhs(const DomainMask& omega, const ScalarField& f) {
    require_same_grid(f.grid(), omega.grid(), "right-hand side");
    if (!f.all_finite()) throw validation_error("right-hand side has non-finite values");
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (!omega.in_omega(i) && f[i] != 0.0) throw validation_error("right-hand side is not supported in Omega");
    }
}

}  // namespace

CoefficientField gamma_field(const DomainMask& omega, const SampledKernel& kernel) {
    const Grid& g = omega.grid();
    ScalarField outside(g);
    for (std::size_t i = 0; i < g.size(); ++i) outside[i] = omega.in_omega(i) ? 0.0 : 1.0;
    ScalarField gamma = Convolver(g, kernel).apply(outside);
    for (std::size_t i = 0; i < g.size(); ++i) {
        gamma[i] = omega.in_omega(i) ? std::max(gamma[i], 0.0) : 0.0;
    }
    return CoefficientField{std::move(gamma), CoefficientRole::gamma};
}

CoefficientField lambda_field(const CoefficientField& chi, const DomainMask& omega, const SampledKernel& kernel) {
    require_chi(chi, omega);
    const Grid& g = omega.grid();
    ScalarField integrand(g);
    for (std::size_t i = 0; i < g.size(); ++i) integrand[i] = (omega.in_omega(i) ? 0.0 : 1.0) + chi.values[i];
    ScalarField lambda = Convolver(g, kernel).apply(integrand);
    for (std::size_t i = 0; i < g.size(); ++i) lambda[i] = omega.in_omega(i) ? lambda[i] - chi.values[i] : 0.0;
    return CoefficientField{std::move(lambda), CoefficientRole::lambda};
}

CoefficientField nu_field(const CoefficientField& chi, const DomainMask& omega) {
    require_chi(chi, omega);
    ScalarField nu(omega.grid());
    for (std::size_t i = 0; i < nu.size(); ++i) {
        const double c = chi.values[i];
        nu[i] = (omega.in_omega(i) && c >= kVanishingThreshold) ? (1.0 - c) / c : 0.0;
    }
    return CoefficientField{std::move(nu), CoefficientRole::nu};
}

LimitSolveResult solve_limit(const LimitProblem& p, const ScalarField& f, const SolveOptions& options) {
    require_chi(p.chi, p.omega);
    require_supported_rhs(p.omega, f);
    const Grid& g = p.omega.grid();
    LimitSolveResult result{ScalarField(g), 0, 0.0, {}};

    const NonlocalOperator op(support_mask(p.omega, &p.chi.values), p.kernel, BoundaryCondition::dirichlet_holes);
    const std::size_t n = op.unknowns().size();
    if (n == 0) return result;

    std::vector<double> z(n);
    if (p.kind == LimitKind::dirichlet) {
        for (std::size_t k = 0; k < n; ++k) {
            const double c = p.chi.values[op.unknowns()[k]];
            z[k] = (1.0 - c) / c;
        }
    } else {
        const CoefficientField lambda = p.lambda ? *p.lambda : lambda_field(p.chi, p.omega, p.kernel);
        require_same_grid(lambda.values.grid(), g, "Lambda field");
        double min_lambda = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const std::size_t i = op.unknowns()[k];
            min_lambda = std::min(min_lambda, lambda.values[i]);
            z[k] = lambda.values[i] / p.chi.values[i];
        }
        if (min_lambda < -1e-12) {
            result.warnings.push_back("Lambda takes negative values (min " + std::to_string(min_lambda)
                                      + "); the uniqueness argument does not apply");
        }
    }

    // ||X r|| <= ||r|| <= tol' ||f||, so tol' = tol ||X f|| / ||f|| meets the undivided criterion.
    std::vector<double> rhs = op.compress(f);
    double chi_f = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double c = p.chi.values[op.unknowns()[k]];
        chi_f += c * c * rhs[k] * rhs[k];
    }
    const double f_norm = detail::norm(rhs);
    if (f_norm == 0.0) return result;
    const double tol = options.tol * std::sqrt(chi_f) / f_norm;

    const ShiftedSolve s = shifted_solve(op, z, rhs, tol, options.max_iterations);
    std::vector<double> r(n);
    op.apply_compressed(s.x, r);
    double num = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const double c = p.chi.values[op.unknowns()[k]];
        const double div_residual = -(r[k] + z[k] * s.x[k]) - rhs[k];
        num += c * c * div_residual * div_residual;
    }
    result.iterations = s.cg.iterations;
    result.residual = std::sqrt(num / chi_f);
    if (!s.cg.converged) throw solver_error("limit solve did not converge", result.residual, result.iterations);
    result.u = op.expand(s.x);
    return result;
}

LimitSolveResult solve_nu_form(const DomainMask& omega, const SampledKernel& kernel, const ScalarField& nu,
                               const ScalarField& f, const SolveOptions& options) {
    require_supported_rhs(omega, f);
    require_same_grid(nu.grid(), omega.grid(), "nu field");
    const NonlocalOperator op(support_mask(omega, nullptr), kernel, BoundaryCondition::dirichlet_holes);
    const std::size_t n = op.unknowns().size();
    std::vector<double> z(n);
    for (std::size_t k = 0; k < n; ++k) {
        z[k] = nu[op.unknowns()[k]];
        if (!(z[k] >= 0.0)) throw validation_error("nu must be nonnegative");
    }
    const ShiftedSolve s = shifted_solve(op, z, op.compress(f), options.tol, options.max_iterations);
    if (!s.cg.converged) throw solver_error("nu-form solve did not converge", s.cg.residual, s.cg.iterations);
    return LimitSolveResult{op.expand(s.x), s.cg.iterations, s.cg.residual, {}};
}

std::vector<TestFunction> test_battery(const Box& omega) {
    const int dim = omega.dim;
    auto coord = [omega](int a) {
        return [omega, a](const Point& x) { return (x[a] - omega.lower[a]) / (omega.upper[a] - omega.lower[a]); };
    };
    std::vector<TestFunction> tests;
    tests.push_back({"one", [](const Point&) { return 1.0; }});
    for (int a = 0; a < dim; ++a) {
        tests.push_back({"s" + std::to_string(a), coord(a)});
    }
    for (int a = 0; a < dim; ++a) {
        for (int b = a; b < dim; ++b) {
            auto sa = coord(a);
            auto sb = coord(b);
            tests.push_back({"s" + std::to_string(a) + "*s" + std::to_string(b),
                             [sa, sb](const Point& x) { return sa(x) * sb(x); }});
        }
    }
    tests.push_back({"prod_sin", [omega, dim](const Point& x) {
                         double v = 1.0;
                         for (int a = 0; a < dim; ++a) {
                             v *= std::sin(std::numbers::pi * (x[a] - omega.lower[a]) / (omega.upper[a] - omega.lower[a]));
                         }
                         return v;
                     }});
    tests.push_back({"prod_cos", [omega, dim](const Point& x) {
                         double v = 1.0;
                         for (int a = 0; a < dim; ++a) {
                             v *= std::cos(std::numbers::pi * (x[a] - omega.lower[a]) / (omega.upper[a] - omega.lower[a]));
                         }
                         return v;
                     }});
    return tests;
}

std::vector<ScalarField> sample_tests(const std::vector<TestFunction>& tests, const DomainMask& omega) {
    std::vector<ScalarField> out;
    out.reserve(tests.size());
    const Grid& g = omega.grid();
    for (const auto& t : tests) {
        ScalarField phi(g);
        for (std::size_t i = 0; i < g.size(); ++i) {
            if (omega.in_omega(i)) phi[i] = t.fn(g.center(i));
        }
        out.push_back(std::move(phi));
    }
    return out;
}

double SweepRecord::get(const std::string& name) const {
    for (const auto& [key, v] : diagnostics) {
        if (key == name) return v;
    }
    throw validation_error("sweep record has no diagnostic '" + name + "'");
}

std::vector<SweepRecord> epsilon_sweep(const EpsilonSweepConfig& config) {
    if (config.epsilons.empty()) throw validation_error("epsilon sweep needs at least one epsilon");
    for (std::size_t i = 1; i < config.epsilons.size(); ++i) {
        if (!(config.epsilons[i] < config.epsilons[i - 1])) {
            throw validation_error("epsilons must be strictly decreasing");
        }
    }
    const std::vector<TestFunction> tests = config.tests.empty() ? test_battery(config.geometry.omega) : config.tests;
    std::vector<SweepRecord> records;

    for (double eps : config.epsilons) {
        SweepRecord rec;
        rec.parameter = "epsilon";
        rec.value = eps;
        const double h = config.grid.spacing(eps);
        rec.diagnostics.emplace_back("epsilon", eps);
        rec.diagnostics.emplace_back("h", h);
        try {
            PerforationSpec spec = config.geometry;
            spec.epsilon = eps;
            const Grid grid = Grid::covering(spec.omega, h, config.kernel.support_radius());
            const DomainMask mask = build_periodic_mask(spec, grid);
            const SampledKernel kernel = sample(config.kernel, h);
            const NonlocalOperator op(mask, kernel, config.bc);

            ScalarField f(grid);
            for (std::size_t i = 0; i < grid.size(); ++i) {
                if (mask.in_omega(i)) f[i] = config.f(grid.center(i));
            }
            const SolveResult eps_solve = solve(op, f, config.solve);

            ScalarField star(grid);
            if (config.limit_solver) {
                star = config.limit_solver(mask, kernel, f);
            } else {
                const WeakLimit limit = analytic_weak_limit(spec, grid);
                LimitProblem problem{config.bc == BoundaryCondition::dirichlet_holes ? LimitKind::dirichlet
                                                                                     : LimitKind::neumann,
                                     mask, limit.chi, kernel, std::nullopt};
                star = solve_limit(problem, f, config.solve).u;
            }

            if (config.compute_eigenvalue) {
                rec.diagnostics.emplace_back("lambda1", first_eigenvalue(op, config.spectral).eigenvalue);
            }
            rec.diagnostics.emplace_back("l2_norm_u", l2_norm(eps_solve.u));

            const ScalarField diff = eps_solve.u - star;
            const auto phis = sample_tests(tests, mask);
            for (std::size_t k = 0; k < phis.size(); ++k) {
                rec.diagnostics.emplace_back("pairing_err_phi" + std::to_string(k + 1),
                                             std::abs(inner_product(diff, phis[k])));
            }
            rec.diagnostics.emplace_back("solver_iters", static_cast<double>(eps_solve.iterations));
            rec.diagnostics.emplace_back("residual", eps_solve.residual);
        } catch (const error& e) {
            rec.error = e.what();
        }
        records.push_back(std::move(rec));
    }
    return records;
}

}  // namespace perfhom
