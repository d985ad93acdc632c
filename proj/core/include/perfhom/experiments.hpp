#pragma once

#include <string>
#include <vector>

#include "perfhom/homogenize.hpp"
#include "perfhom/localref.hpp"

namespace perfhom {

struct DeltaSweepConfig {
    /// Omega^eps; its grid must satisfy h <= min(delta) / 4 and carry a margin of max(delta).
    DomainMask mask;
    Profile profile = Profile::bump;
    BoundaryCondition bc = BoundaryCondition::dirichlet_holes;
    /// Strictly decreasing, each in (0, 1].
    std::vector<double> deltas;
    ScalarField f;
    /// Local reference problem; its solution v_ref is computed once.
    LocalProblem reference;
    SolveOptions solve;
};

/// For each delta: solves the nonlocal problem with the second-moment kernel
/// J_delta and records delta, h, error_l2 = ||u_delta - v_ref|| over Omega^eps,
/// l2_norm_u, reference_norm, solver_iters and residual.
std::vector<SweepRecord> delta_localization_sweep(const DeltaSweepConfig& config);

/// Hole-size regimes relative to the local critical radius a_eps and the
/// nonlocal critical radius b_eps = C0 eps.
enum class Regime {
    ll_b,         ///< r << b_eps
    eq_b,         ///< r = b_eps
    between_a_b,  ///< a_eps << r << b_eps
    eq_a,         ///< r = a_eps (N >= 3)
    ll_a,         ///< r << a_eps
};

std::string_view to_string(Regime r);
Regime parse_regime(std::string_view name);

struct CaseVerdict {
    std::string case_id;
    std::string bc;
    Regime regime = Regime::eq_b;
    ScalarField w;
    ScalarField v;
    double w_norm = 0.0;
    double v_norm = 0.0;
    /// ||w - v|| / max(||w||, ||v||, 1).
    double distance = 0.0;
    bool equal = false;
    /// The equality predicted by the case table.
    bool predicted_equal = false;
    double mu = 0.0;
    Tensor q{};
    double material_fraction = 1.0;
};

struct IteratedLimitConfig {
    int dim = 2;
    /// Omega = (0, side)^N.
    double side = 4.0;
    /// Interior nodes per axis.
    long nodes = 63;
    double c0 = 1.0;
    SpatialFunction f = [](const Point&) { return 1.0; };
    SolveOptions solve{1e-10};
    /// Neumann eq_b: the periodic cell and the spacing of its solver.
    CellGeometry cell;
    double cell_spacing = 1.0 / 64.0;
};

/// Thresholds for the verdict: distance <= 5 tol is "equal", >= 0.05 "unequal".
inline constexpr double kUnequalThreshold = 0.05;

/// Classifies a distance; throws verdict_gap_error between the thresholds.
bool classify_distance(double distance, double tol);

/// lim_eps lim_delta (v) against lim_delta lim_eps (w) for the Dirichlet
/// problem, computed from the limit equations. ll_b is rejected because it
/// spans several distinct cases.
CaseVerdict iterated_limit_dirichlet(Regime regime, const IteratedLimitConfig& config);

/// Neumann counterpart; only eq_b and ll_b are distinct cases.
CaseVerdict iterated_limit_neumann(Regime regime, const IteratedLimitConfig& config);

struct CriticalSweepConfig {
    Box omega{2, {0.0, 0.0, 0.0}, {1.0, 1.0, 0.0}};
    double c0 = 0.25;
    /// Hole radius C0 eps^gamma; gamma = 1 is the critical case.
    double gamma = 1.0;
    std::vector<double> epsilons{0.25, 0.125, 0.0625};
    KernelSpec kernel;
    SpatialFunction f = [](const Point&) { return 1.0; };
    GridPolicy grid;
    SolveOptions solve;
    bool compute_eigenvalue = false;
    SpectralOptions spectral{1e-6};
};

/// Dirichlet epsilon-sweep over periodic balls compared with the nu-equation
/// J * u - m u - nu u = f, nu = (1 - X) / X (nu = 0 for gamma > 1, u* = 0 for
/// gamma < 1). Rows carry the epsilon-sweep columns plus chi_limit and nu.
std::vector<SweepRecord> nonlocal_critical_sweep(const CriticalSweepConfig& config);

}  // namespace perfhom
