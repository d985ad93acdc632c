#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "perfhom/geometry.hpp"
#include "perfhom/kernel.hpp"
#include "perfhom/nonlocal.hpp"

namespace perfhom {

/// Threshold below which X is treated as zero (the vanishing set D).
inline constexpr double kVanishingThreshold = 1e-12;

/// Gamma(x): kernel mass on the exterior of Omega, at Omega nodes (zero elsewhere).
CoefficientField gamma_field(const DomainMask& omega, const SampledKernel& kernel);

/// Lambda(x) = (J * (1 - chi_Omega + X))(x) - X(x) at Omega nodes (zero elsewhere).
CoefficientField lambda_field(const CoefficientField& chi, const DomainMask& omega, const SampledKernel& kernel);

/// nu = (1 - X) / X where X >= kVanishingThreshold, zero elsewhere.
CoefficientField nu_field(const CoefficientField& chi, const DomainMask& omega);

enum class LimitKind { dirichlet, neumann };

struct LimitProblem {
    LimitKind kind = LimitKind::dirichlet;
    /// Only the Omega / exterior split of this mask is used.
    DomainMask omega;
    CoefficientField chi;
    SampledKernel kernel;
    /// Neumann only; computed from chi when absent.
    std::optional<CoefficientField> lambda;
};

struct LimitSolveResult {
    ScalarField u;
    std::size_t iterations = 0;
    /// Residual of the undivided equation over Omega \ D, relative to ||X f||.
    double residual = 0.0;
    std::vector<std::string> warnings;
};

/// Solves the homogenised limit equation
///
///     X f = X (J * u - m u) - Z u   on Omega \ D,   u = 0 on D and outside Omega,
///
/// with Z = 1 - X (Dirichlet) or Z = Lambda (Neumann), m the discrete kernel
/// mass. The system is divided by X, which makes it symmetric. Returns the
/// zero field when X vanishes identically.
LimitSolveResult solve_limit(const LimitProblem& p, const ScalarField& f, const SolveOptions& options = {});

/// Solves f = J * u - m u - nu u on Omega (u = 0 outside) for a zero-order
/// coefficient field nu >= 0.
LimitSolveResult solve_nu_form(const DomainMask& omega, const SampledKernel& kernel, const ScalarField& nu,
                               const ScalarField& f, const SolveOptions& options = {});

using SpatialFunction = std::function<double(const Point&)>;

struct TestFunction {
    std::string name;
    SpatialFunction fn;
};

/// Monomials of total degree <= 2 in the normalised coordinates of `omega`
/// (s = (x - lower) / (upper - lower)), then prod sin(pi s_a) and prod cos(pi s_a).
std::vector<TestFunction> test_battery(const Box& omega);

/// Samples each test function on the grid, zero outside Omega.
std::vector<ScalarField> sample_tests(const std::vector<TestFunction>& tests, const DomainMask& omega);

/// One row of a sweep: the swept parameter plus ordered named diagnostics.
struct SweepRecord {
    std::string parameter;
    double value = 0.0;
    std::vector<std::pair<std::string, double>> diagnostics;
    /// Set when the solve for this row failed; diagnostics are then partial.
    std::string error;

    double get(const std::string& name) const;
    bool ok() const { return error.empty(); }
};

struct GridPolicy {
    /// Either a fixed spacing (> 0) or h = epsilon / ratio.
    double fixed_spacing = 0.0;
    double ratio = 8.0;

    double spacing(double epsilon) const { return fixed_spacing > 0.0 ? fixed_spacing : epsilon / ratio; }
};

struct EpsilonSweepConfig {
    /// Template geometry; epsilon is overwritten per row.
    PerforationSpec geometry;
    std::vector<double> epsilons;
    BoundaryCondition bc = BoundaryCondition::dirichlet_holes;
    KernelSpec kernel;
    SpatialFunction f = [](const Point&) { return 1.0; };
    std::vector<TestFunction> tests;
    GridPolicy grid;
    SolveOptions solve;
    bool compute_eigenvalue = true;
    SpectralOptions spectral{1e-6};
    /// Replaces solve_limit for the reference u* when set.
    std::function<ScalarField(const DomainMask&, const SampledKernel&, const ScalarField&)> limit_solver;
};

/// For each epsilon: builds the perforated mask, solves the epsilon problem,
/// solves the limit problem with the analytic X on the same grid, and records
///
///     epsilon, h, lambda1, l2_norm_u, pairing_err_phi1..K, solver_iters, residual
///
/// where the pairing errors are |<u_eps - u*, phi_k>| and l2_norm_u = ||u_eps||.
/// lambda1 is omitted when compute_eigenvalue is false.
/// Failures are recorded on the row and the sweep continues.
std::vector<SweepRecord> epsilon_sweep(const EpsilonSweepConfig& config);

}  // namespace perfhom
