#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace perfhom::detail {

using LinearMap = std::function<void(std::span<const double>, std::span<double>)>;
using Projection = std::function<void(std::span<double>)>;

struct CgResult {
    std::size_t iterations = 0;
    /// ||b - A x|| / ||b||, recomputed from scratch at exit.
    double residual = 0.0;
    bool converged = false;
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// (semi)definite A. `x` holds the initial guess on entry. An optional
/// projection is applied to the right-hand side and to every residual and
/// search direction, which restricts the iteration to a subspace (used to
/// remove the constant null space of periodic problems).
CgResult conjugate_gradient(const LinearMap& apply, std::span<const double> diagonal, std::span<const double> b,
                            std::span<double> x, double tol, std::size_t max_iterations,
                            const Projection& project = {});

double dot(std::span<const double> a, std::span<const double> b);
double norm(std::span<const double> a);

}  // namespace perfhom::detail
