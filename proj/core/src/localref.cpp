#include "perfhom/localref.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>

#include "linear_solver.hpp"
#include "perfhom/errors.hpp"
#include "perfhom/kernel.hpp"

namespace perfhom {
namespace {

using SparseRow = Eigen::SparseMatrix<double, Eigen::RowMajor>;

void require_spd(const Tensor& q, int dim) {
    Eigen::MatrixXd m(dim, dim);
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < dim; ++b) m(a, b) = q[a][b];
    }
    for (int a = 0; a < dim; ++a) {
        for (int b = 0; b < a; ++b) {
            if (std::abs(q[a][b] - q[b][a]) > 1e-14 * std::max(1.0, std::abs(q[a][b]))) {
                throw validation_error("diffusion tensor q is not symmetric");
            }
        }
    }
    Eigen::LLT<Eigen::MatrixXd> llt(m);
    if (llt.info() != Eigen::Success) throw validation_error("diffusion tensor q is not positive definite");
}

struct LocalSystem {
    std::vector<std::size_t> unknowns;
    std::vector<long> slot;
    SparseRow a;  // c - L_h on the unknowns (SPD)
};

LocalSystem assemble(const LocalProblem& p) {
    const DomainMask& mask = p.mask;
    const Grid& g = mask.grid();
    const int dim = g.dim();
    require_spd(p.q, dim);
    bool cross = false;
    for (int a = 0; a < dim; ++a) {
        for (int b = a + 1; b < dim; ++b) cross = cross || p.q[a][b] != 0.0;
    }
    if (cross && p.holes == HoleCondition::neumann) {
        throw validation_error("off-diagonal diffusion is not supported together with Neumann holes");
    }
    if (p.reaction_field) require_same_grid(p.reaction_field->grid(), g, "reaction field");

    LocalSystem s;
    s.slot.assign(g.size(), -1);
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (mask[i] == Label::omega_eps) {
            s.slot[i] = static_cast<long>(s.unknowns.size());
            s.unknowns.push_back(i);
        }
    }
    if (s.unknowns.empty()) throw validation_error("no Omega^eps nodes for the local problem");

    const double h2 = g.spacing() * g.spacing();
    auto neighbour = [&](const Index& idx, int a, long da, int b, long db) -> long {
        Index n = idx;
        n[a] += da;
        if (b >= 0) n[b] += db;
        if (!g.in_bounds(n)) return -2;  // off-grid: exterior
        return static_cast<long>(g.ravel(n));
    };

    std::vector<Eigen::Triplet<double>> trip;
    for (std::size_t k = 0; k < s.unknowns.size(); ++k) {
        const std::size_t i = s.unknowns[k];
        const Index idx = g.unravel(i);
        const auto row = static_cast<Eigen::Index>(k);
        double diag = p.reaction_field ? (*p.reaction_field)[i] : p.reaction;
        if (!(diag >= 0.0)) throw validation_error("reaction coefficient must be nonnegative");
        for (int a = 0; a < dim; ++a) {
            const double qa = p.q[a][a] / h2;
            for (long sgn : {-1L, 1L}) {
                const long n = neighbour(idx, a, sgn, -1, 0);
                if (n >= 0 && s.slot[static_cast<std::size_t>(n)] >= 0) {
                    diag += qa;
                    trip.emplace_back(row, s.slot[static_cast<std::size_t>(n)], -qa);
                } else if (n >= 0 && mask[static_cast<std::size_t>(n)] == Label::hole
                           && p.holes == HoleCondition::neumann) {
                    // mirror ghost: no flux through this face
                } else {
                    diag += 2.0 * qa;
                }
            }
            for (int b = a + 1; b < dim; ++b) {
                const double qab = p.q[a][b];
                if (qab == 0.0) continue;
                const double w = qab / (2.0 * h2);
                for (long sa : {-1L, 1L}) {
                    for (long sb : {-1L, 1L}) {
                        const long n = neighbour(idx, a, sa, b, sb);
                        if (n < 0 || s.slot[static_cast<std::size_t>(n)] < 0) continue;
                        trip.emplace_back(row, s.slot[static_cast<std::size_t>(n)], -w * static_cast<double>(sa * sb));
                    }
                }
            }
        }
        trip.emplace_back(row, row, diag);
    }
    const auto n = static_cast<Eigen::Index>(s.unknowns.size());
    s.a.resize(n, n);
    s.a.setFromTriplets(trip.begin(), trip.end());
    return s;
}

void multiply(const SparseRow& a, std::span<const double> x, std::span<double> y) {
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    Eigen::Map<Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    yv.noalias() = a * xv;
}

std::vector<double> diagonal_of(const SparseRow& a) {
    std::vector<double> d(static_cast<std::size_t>(a.rows()));
    for (Eigen::Index k = 0; k < a.rows(); ++k) d[static_cast<std::size_t>(k)] = a.coeff(k, k);
    return d;
}

struct CellHole {
    bool present = false;
    bool ball = false;
    Point centre{};
    double radius = 0.0;
    Point lower{};
    Point upper{};

    bool contains(const Point& y, int dim) const {
        if (!present) return false;
        if (ball) {
            double r2 = 0.0;
            for (int a = 0; a < dim; ++a) r2 += (y[a] - centre[a]) * (y[a] - centre[a]);
            return r2 < radius * radius;
        }
        for (int a = 0; a < dim; ++a) {
            if (y[a] < lower[a] || y[a] > upper[a]) return false;
        }
        return true;
    }

    // Unit gradient of the signed distance to B at y.
    Point normal(const Point& y, int dim) const {
        Point n{};
        double len = 0.0;
        if (ball) {
            for (int a = 0; a < dim; ++a) {
                n[a] = y[a] - centre[a];
                len += n[a] * n[a];
            }
        } else {
            bool outside = false;
            for (int a = 0; a < dim; ++a) {
                const double c = std::clamp(y[a], lower[a], upper[a]);
                n[a] = y[a] - c;
                outside = outside || n[a] != 0.0;
                len += n[a] * n[a];
            }
            if (!outside) {
                // Inside: the nearest face decides the direction.
                int best = 0;
                double best_gap = std::numeric_limits<double>::infinity();
                double dir = 1.0;
                for (int a = 0; a < dim; ++a) {
                    const double lo = y[a] - lower[a];
                    const double hi = upper[a] - y[a];
                    if (lo < best_gap) {
                        best_gap = lo;
                        best = a;
                        dir = -1.0;
                    }
                    if (hi < best_gap) {
                        best_gap = hi;
                        best = a;
                        dir = 1.0;
                    }
                }
                n = Point{};
                n[best] = dir;
                return n;
            }
        }
        len = std::sqrt(len);
        if (len == 0.0) return Point{};
        for (int a = 0; a < dim; ++a) n[a] /= len;
        return n;
    }
};

CellHole make_cell_hole(const CellGeometry& cell) {
    const int dim = cell.dim();
    CellHole hole;
    if (const auto* ball = std::get_if<BallHole>(&cell.hole)) {
        hole.present = true;
        hole.ball = true;
        hole.radius = ball->radius_factor;
        double min_len = cell.cell_lengths[0];
        for (int a = 0; a < dim; ++a) {
            hole.centre[a] = 0.5 * cell.cell_lengths[a];
            min_len = std::min(min_len, cell.cell_lengths[a]);
        }
        if (!(hole.radius > 0.0)) throw validation_error("cell hole radius must be positive");
        if (hole.radius >= 0.5 * min_len) throw validation_error("cell hole touches the cell boundary");
    } else if (const auto* box = std::get_if<BoxHole>(&cell.hole)) {
        hole.present = true;
        for (int a = 0; a < dim; ++a) {
            hole.lower[a] = box->lower[a];
            hole.upper[a] = box->upper[a];
            if (!(box->lower[a] > 0.0 && box->upper[a] < cell.cell_lengths[a] && box->upper[a] > box->lower[a])) {
                throw validation_error("cell hole must lie strictly inside the cell");
            }
        }
    }
    return hole;
}

}  // namespace

Tensor identity_tensor(int dim) {
    Tensor t{};
    for (int a = 0; a < dim; ++a) t[a][a] = 1.0;
    return t;
}

ScalarField apply_local(const LocalProblem& p, const ScalarField& v) {
    require_same_grid(v.grid(), p.mask.grid(), "apply_local");
    const LocalSystem s = assemble(p);
    std::vector<double> x(s.unknowns.size()), y(s.unknowns.size());
    for (std::size_t k = 0; k < x.size(); ++k) x[k] = v[s.unknowns[k]];
    multiply(s.a, x, y);
    ScalarField out(v.grid());
    for (std::size_t k = 0; k < y.size(); ++k) out[s.unknowns[k]] = -y[k];
    return out;
}

LocalSolveResult solve_local(const LocalProblem& p, const ScalarField& f, const SolveOptions& options) {
    const Grid& g = p.mask.grid();
    require_same_grid(f.grid(), g, "solve_local");
    if (!f.all_finite()) throw validation_error("right-hand side has non-finite values");
    const LocalSystem s = assemble(p);
    const std::size_t n = s.unknowns.size();
    std::vector<double> b(n), x(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) b[k] = -f[s.unknowns[k]];
    const auto diag = diagonal_of(s.a);
    // FD systems have condition number O(h^-2); allow more iterations than the nonlocal default.
    const std::size_t max_it = options.max_iterations ? options.max_iterations : 20 * n + 200;
    const auto res = detail::conjugate_gradient(
        [&](std::span<const double> in, std::span<double> out) { multiply(s.a, in, out); }, diag, b, x, options.tol,
        max_it);
    if (!res.converged) throw solver_error("local solve did not converge", res.residual, res.iterations);
    ScalarField v(g);
    for (std::size_t k = 0; k < n; ++k) v[s.unknowns[k]] = x[k];
    return LocalSolveResult{std::move(v), res.iterations, res.residual};
}

CellSolution homogenized_coefficients(const CellGeometry& cell, double h, double tol) {
    const int dim = cell.dim();
    if (dim < 1 || dim > kMaxDim) throw validation_error("cell dimension must be in [1, 3]");
    std::array<long, kMaxDim> ext{1, 1, 1};
    double cell_volume = 1.0;
    for (int a = 0; a < dim; ++a) {
        const double l = cell.cell_lengths[a];
        if (!(l > 0.0)) throw validation_error("cell lengths must be positive");
        const double cells = l / h;
        ext[a] = std::llround(cells);
        if (std::abs(cells - static_cast<double>(ext[a])) > 1e-9) {
            throw validation_error("cell spacing must divide every cell length");
        }
        cell_volume *= l;
    }
    const CellHole hole = make_cell_hole(cell);
    Grid grid(dim, Point{}, h, ext);
    CellSolution sol{grid, std::vector<std::uint8_t>(grid.size(), 1), {}, Tensor{}, 1.0, 0};

    std::vector<long> slot(grid.size(), -1);
    std::vector<std::size_t> nodes;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (hole.contains(grid.center(i), dim)) {
            sol.material[i] = 0;
        } else {
            slot[i] = static_cast<long>(nodes.size());
            nodes.push_back(i);
        }
    }
    if (nodes.empty()) throw validation_error("cell has no material nodes");
    const std::size_t n = nodes.size();
    const double hn = grid.cell_volume();
    sol.material_fraction = static_cast<double>(n) * hn / cell_volume;

    auto wrap = [&](Index idx, int a, long s) {
        idx[a] = (idx[a] + s + ext[a]) % ext[a];
        return grid.ravel(idx);
    };

    // Periodic Laplacian on the material nodes; hole faces carry prescribed flux.
    const double h2 = h * h;
    std::vector<Eigen::Triplet<double>> trip;
    struct HoleFace {
        std::size_t row;
        int axis;
        long sign;
        Point normal;
    };
    std::vector<HoleFace> faces;
    for (std::size_t k = 0; k < n; ++k) {
        const Index idx = grid.unravel(nodes[k]);
        double diag = 0.0;
        for (int a = 0; a < dim; ++a) {
            for (long s : {-1L, 1L}) {
                const std::size_t nb = wrap(idx, a, s);
                if (slot[nb] >= 0) {
                    diag += 1.0 / h2;
                    trip.emplace_back(static_cast<Eigen::Index>(k), slot[nb], -1.0 / h2);
                } else {
                    Point mid = grid.center(idx);
                    mid[a] += 0.5 * static_cast<double>(s) * h;
                    faces.push_back({k, a, s, hole.normal(mid, dim)});
                }
            }
        }
        trip.emplace_back(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k), diag);
    }
    SparseRow a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(trip.begin(), trip.end());
    const auto diag = diagonal_of(a);
    for (double d : diag) {
        if (!(d > 0.0)) throw validation_error("cell has an isolated material node");
    }

    auto project = [n](std::span<double> v) {
        double mean = 0.0;
        for (double x : v) mean += x;
        mean /= static_cast<double>(n);
        for (double& x : v) x -= mean;
    };

    for (int i = 0; i < dim; ++i) {
        // Face flux d_{n_f} X^i = eta_i (eta . n_f), independent of the orientation of eta.
        std::vector<double> flux(faces.size());
        std::vector<double> b(n, 0.0);
        for (std::size_t f = 0; f < faces.size(); ++f) {
            flux[f] = faces[f].normal[i] * faces[f].normal[faces[f].axis] * static_cast<double>(faces[f].sign);
            b[faces[f].row] += flux[f] / h;
        }
        std::vector<double> x(n, 0.0);
        const auto res = detail::conjugate_gradient(
            [&](std::span<const double> in, std::span<double> out) { multiply(a, in, out); }, diag, b, x, tol,
            40 * n + 200, project);
        if (!res.converged) throw solver_error("cell problem did not converge", res.residual, res.iterations);
        sol.iterations += res.iterations;

        ScalarField corrector(grid);
        for (std::size_t k = 0; k < n; ++k) corrector[nodes[k]] = x[k];

        // int dX^i/dy_j by centred differences, ghost values from the face flux.
        std::vector<std::vector<double>> ghost_flux(n, std::vector<double>(2 * static_cast<std::size_t>(dim), 0.0));
        for (std::size_t f = 0; f < faces.size(); ++f) {
            ghost_flux[faces[f].row][2 * static_cast<std::size_t>(faces[f].axis) + (faces[f].sign > 0 ? 1 : 0)] = flux[f];
        }
        for (int j = 0; j < dim; ++j) {
            double integral = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                const Index idx = grid.unravel(nodes[k]);
                double plus = 0.0;
                double minus = 0.0;
                const std::size_t np = wrap(idx, j, 1);
                const std::size_t nm = wrap(idx, j, -1);
                plus = slot[np] >= 0 ? x[static_cast<std::size_t>(slot[np])] : x[k] + h * ghost_flux[k][2 * static_cast<std::size_t>(j) + 1];
                // Each ghost lies one step along its face normal: X_g = X_p + h * flux.
                minus = slot[nm] >= 0 ? x[static_cast<std::size_t>(slot[nm])] : x[k] + h * ghost_flux[k][2 * static_cast<std::size_t>(j)];
                integral += (plus - minus) / (2.0 * h);
            }
            integral *= hn;
            sol.q[i][j] = ((i == j ? static_cast<double>(n) * hn : 0.0) - integral) / cell_volume;
        }
        sol.corrector.push_back(std::move(corrector));
    }
    return sol;
}

double mu_constant(int dim, double c0) {
    if (dim < 3) throw validation_error("mu requires N >= 3");
    if (!(c0 > 0.0)) throw validation_error("C0 must be positive");
    return unit_sphere_area(dim) * static_cast<double>(dim - 2) / std::pow(2.0, dim) * std::pow(c0, dim - 2);
}

}  // namespace perfhom
