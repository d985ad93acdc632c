#include "linear_solver.hpp"

#include <cmath>

#include "perfhom/errors.hpp"

namespace perfhom::detail {

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

CgResult conjugate_gradient(const LinearMap& apply, std::span<const double> diagonal, std::span<const double> b_in,
                            std::span<double> x, double tol, std::size_t max_iterations,
                            const Projection& project) {
    const std::size_t n = b_in.size();
    if (x.size() != n || diagonal.size() != n) throw shape_error("conjugate_gradient: size mismatch");
    for (double d : diagonal) {
        if (!(d > 0.0)) throw validation_error("conjugate_gradient: preconditioner diagonal must be positive");
    }
    std::vector<double> b(b_in.begin(), b_in.end());
    if (project) project(b);
    CgResult result;
    const double bnorm = norm(b);
    if (bnorm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        result.converged = true;
        return result;
    }

    std::vector<double> r(n), z(n), p(n), q(n);
    auto true_residual = [&] {
        apply(x, q);
        for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - q[i];
        if (project) project(r);
        return norm(r) / bnorm;
    };

    // A few restarts from the true residual guard against drift in the recurrence.
    double rel = true_residual();
    for (int restart = 0; restart < 4 && rel > tol && result.iterations < max_iterations; ++restart) {
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diagonal[i];
        if (project) project(z);
        p = z;
        double rz = dot(r, z);
        while (result.iterations < max_iterations) {
            apply(p, q);
            const double pq = dot(p, q);
            if (!(pq > 0.0)) break;
            const double alpha = rz / pq;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += alpha * p[i];
                r[i] -= alpha * q[i];
            }
            if (project) project(r);
            ++result.iterations;
            if (norm(r) <= 0.5 * tol * bnorm) break;
            for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diagonal[i];
            if (project) project(z);
            const double rz_next = dot(r, z);
            const double beta = rz_next / rz;
            rz = rz_next;
            for (std::size_t i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
        if (project) project(x);
        rel = true_residual();
    }
    result.residual = rel;
    result.converged = rel <= tol;
    return result;
}

}  // namespace perfhom::detail
