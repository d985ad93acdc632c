#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "perfhom/convolution.hpp"
#include "perfhom/geometry.hpp"
#include "perfhom/kernel.hpp"

namespace perfhom {

enum class BoundaryCondition {
    dirichlet_holes,  ///< integrate over all of R^N
    neumann_holes,    ///< integrate over R^N minus the holes
};

std::string_view to_string(BoundaryCondition bc);
BoundaryCondition parse_boundary_condition(std::string_view name);

/// Discrete nonlocal operator
///
///     (L u)(x) = h^N sum_y w(x - y) u(y) - m(x) u(x),   x in Omega^eps,
///
/// where m is the kernel mass over the integration set (all nodes for
/// Dirichlet holes, non-hole nodes for Neumann holes). Admissible fields are
/// supported on Omega^eps for both conditions; u on hole nodes never enters
/// the Neumann integral, so the two admissible spaces coincide on the grid.
class NonlocalOperator {
public:
    NonlocalOperator(DomainMask mask, SampledKernel kernel, BoundaryCondition bc,
                     ConvolutionMethod method = ConvolutionMethod::automatic);

    const DomainMask& mask() const noexcept { return mask_; }
    const SampledKernel& kernel() const noexcept { return kernel_; }
    BoundaryCondition bc() const noexcept { return bc_; }
    const Grid& grid() const noexcept { return mask_.grid(); }
    const Convolver& convolver() const noexcept { return convolver_; }

    /// Linear indices of the Omega^eps nodes, ascending.
    const std::vector<std::size_t>& unknowns() const noexcept { return unknowns_; }
    bool is_unknown(std::size_t node) const { return mask_[node] == Label::omega_eps; }
    /// m(x): kernel mass over the integration set, at every node.
    const ScalarField& integration_mass() const noexcept { return mass_; }

    /// L u on Omega^eps nodes, zero elsewhere. `u` is restricted to Omega^eps first.
    ScalarField apply(const ScalarField& u) const;

    /// y = A x with A = -L on the unknowns (compressed vectors, length unknowns().size()).
    void apply_compressed(std::span<const double> x, std::span<double> y) const;
    /// Diagonal of A: m(x) - h^N w(0).
    std::vector<double> compressed_diagonal() const;
    std::vector<double> compress(const ScalarField& f) const;
    ScalarField expand(std::span<const double> x) const;

private:
    DomainMask mask_;
    SampledKernel kernel_;
    BoundaryCondition bc_;
    Convolver convolver_;
    std::vector<std::size_t> unknowns_;
    ScalarField mass_;
};

struct SolveOptions {
    double tol = 1e-8;
    /// 0 selects 20 sqrt(n) + 200.
    std::size_t max_iterations = 0;
};

struct SolveResult {
    ScalarField u;
    std::size_t iterations = 0;
    /// ||L u - f|| / ||f|| over Omega^eps nodes.
    double residual = 0.0;
};

/// Solves L u = f on Omega^eps with u = 0 elsewhere, by CG on A = -L.
/// Throws validation_error if f is nonzero outside Omega and solver_error on
/// non-convergence.
SolveResult solve(const NonlocalOperator& op, const ScalarField& f, const SolveOptions& options = {});

struct SpectralOptions {
    /// Stop when ||A v - lambda v|| / ||v|| falls below this.
    double tol = 1e-8;
    std::uint64_t seed = 20240611;
    /// Krylov basis size per restart.
    std::size_t basis_size = 80;
    std::size_t max_restarts = 400;
};

struct SpectralResult {
    double eigenvalue = 0.0;
    ScalarField eigenvector;
    double residual = 0.0;
    /// Total operator applications.
    std::size_t iterations = 0;
    std::uint64_t seed = 0;
    /// Eigenvalue numerically zero relative to the operator scale.
    bool singular = false;
};

/// Smallest eigenvalue of A = -L on the admissible space, i.e. the minimum of
/// the Rayleigh quotient -<Lu, u> / <u, u>. Restarted Lanczos with full
/// reorthogonalisation from a seeded random start vector. The returned
/// eigenvector has unit discrete L2 norm.
SpectralResult first_eigenvalue(const NonlocalOperator& op, const SpectralOptions& options = {});

struct CoveringCertificate {
    double layer_width = 0.0;
    /// Nonempty layers B_1..B_L used in the chain.
    std::size_t layer_count = 0;
    /// Layers of the uniform tiling that contained no node and were skipped.
    std::size_t empty_layers = 0;
    std::vector<std::size_t> layer_sizes;
    std::vector<double> alpha;
    std::vector<double> chain;
    /// (sum C_j)^-1: lower bound for the full double-integral energy per unit L2 mass.
    double lambda_lower = 0.0;
    /// lambda_lower / 2: lower bound for the first eigenvalue of A.
    double eigenvalue_lower = 0.0;
    bool established = false;
    /// Index (1-based) of the first layer with alpha_j = 0, when not established.
    std::size_t failed_layer = 0;
    std::string diagnostic;
};

/// Covering Poincare certificate. B_0 is the exterior of Omega; B_j are the
/// nodes of Omega^eps whose Euclidean distance d to the nearest exterior node
/// satisfies (j-1) w < d <= j w. Empty layers are skipped. alpha_j is a quarter
/// of the minimum over B_j of the discrete kernel mass on B_{j-1}.
CoveringCertificate covering_lower_bound(const DomainMask& mask, const SampledKernel& kernel, double layer_width);

/// Exact Euclidean distance (physical units) from every node centre to the
/// nearest node with the given label; +inf if there is none.
ScalarField distance_to_label(const DomainMask& mask, Label target);

}  // namespace perfhom
