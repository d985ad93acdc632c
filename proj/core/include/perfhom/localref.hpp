#pragma once

#include <array>
#include <optional>
#include <vector>

#include "perfhom/geometry.hpp"
#include "perfhom/nonlocal.hpp"

namespace perfhom {

using Tensor = std::array<std::array<double, kMaxDim>, kMaxDim>;

Tensor identity_tensor(int dim);

enum class HoleCondition { dirichlet, neumann };

/// sum_ij q_ij d_i d_j v - c v = f on Omega^eps, v = 0 on the exterior, and
/// either v = 0 or a zero normal derivative on the holes.
struct LocalProblem {
    DomainMask mask;
    HoleCondition holes = HoleCondition::dirichlet;
    /// Constant zero-order coefficient c >= 0 ...
    double reaction = 0.0;
    /// ... or a field c(x) >= 0, which takes precedence when set.
    std::optional<ScalarField> reaction_field;
    Tensor q = identity_tensor(kMaxDim);
};

struct LocalSolveResult {
    ScalarField v;
    std::size_t iterations = 0;
    /// ||L_h v - f|| / ||f|| over Omega^eps nodes.
    double residual = 0.0;
};

/// Cell-centred second-order finite differences. Dirichlet faces (exterior,
/// and holes under HoleCondition::dirichlet) use the antisymmetric ghost
/// v_g = -v, which places the zero at the face midpoint; Neumann hole faces
/// use the mirror ghost v_g = v. Off-diagonal q_ij use the centred cross
/// difference with zero values off Omega^eps (Dirichlet holes only).
LocalSolveResult solve_local(const LocalProblem& p, const ScalarField& f, const SolveOptions& options = {});

/// The discrete operator v -> sum q_ij d_i d_j v - c v on Omega^eps (zero elsewhere).
ScalarField apply_local(const LocalProblem& p, const ScalarField& v);

/// Periodic cell Q = (0, l_1) x ... with a hole B centred in Q.
struct CellGeometry {
    std::vector<double> cell_lengths{1.0, 1.0};
    HoleShape hole = BallHole{};

    int dim() const { return static_cast<int>(cell_lengths.size()); }
};

struct CellSolution {
    Grid grid;
    /// 1 on nodes of Q \ B, 0 on hole nodes.
    std::vector<std::uint8_t> material;
    /// X^i, i = 1..N, zero on hole nodes.
    std::vector<ScalarField> corrector;
    Tensor q{};
    /// |Q \ B| / |Q| on the grid.
    double material_fraction = 1.0;
    std::size_t iterations = 0;
};

/// Solves the cell problems  Delta X^i = 0 in Q \ B,  d_eta X^i = eta_i on dB,
/// X^i periodic with zero mean, and assembles
///
///     q_ij = (|Q \ B| delta_ij - int_{Q\B} dX^i/dy_j) / |Q|.
///
/// The boundary flux through each staircase face uses the exact normal of B
/// at the face midpoint. `h` must divide every cell length.
CellSolution homogenized_coefficients(const CellGeometry& cell, double h, double tol = 1e-11);

/// mu = S_N (N - 2) / 2^N * C0^(N-2), N >= 3.
double mu_constant(int dim, double c0);

}  // namespace perfhom
